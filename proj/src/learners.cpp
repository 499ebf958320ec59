#include <algorithm>
#include <cmath>
#include <limits>

#include "hte/dataset.hpp"
#include "hte/errors.hpp"
#include "hte/learners.hpp"

namespace hte {

std::string to_string(LearnerFamily family) {
  switch (family) {
    case LearnerFamily::kLinear: return "linear";
    case LearnerFamily::kKnn: return "knn";
    case LearnerFamily::kTree: return "tree";
    case LearnerFamily::kForest: return "forest";
    case LearnerFamily::kBoosting: return "boosting";
    case LearnerFamily::kGp: return "gp";
  }
  return "unknown";
}

LearnerFamily learner_family_from_string(std::string_view name) {
  if (name == "linear") return LearnerFamily::kLinear;
  if (name == "knn") return LearnerFamily::kKnn;
  if (name == "tree") return LearnerFamily::kTree;
  if (name == "forest") return LearnerFamily::kForest;
  if (name == "boosting") return LearnerFamily::kBoosting;
  if (name == "gp") return LearnerFamily::kGp;
  throw InvalidArgumentError("unknown base-learner family '" + std::string(name) + "'");
}

double LearnerSpec::param(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

bool LearnerSpec::has_param(const std::string& key) const {
  return params.count(key) > 0;
}

LearnerSpec LearnerSpec::with_param(const std::string& key, double value) const {
  LearnerSpec out = *this;
  out.params[key] = value;
  return out;
}

void validate(const LearnerSpec& spec) {
  auto require = [&](bool ok, const std::string& message) {
    if (!ok) throw InvalidArgumentError("learner spec: " + message);
  };
  switch (spec.family) {
    case LearnerFamily::kLinear:
      require(spec.penalty == "none" || spec.penalty == "ridge" ||
                  spec.penalty == "lasso",
              "penalty must be none, ridge, or lasso");
      if (spec.has_param("lambda")) {
        require(spec.param("lambda", 0.0) >= 0.0, "penalty must be >= 0");
      }
      break;
    case LearnerFamily::kKnn:
      if (spec.has_param("k")) require(spec.param("k", 1) >= 1.0, "k must be >= 1");
      break;
    case LearnerFamily::kTree:
    case LearnerFamily::kForest:
      if (spec.has_param("depth")) {
        require(spec.param("depth", 1) >= 1.0, "depth must be >= 1");
      }
      if (spec.family == LearnerFamily::kForest && spec.has_param("trees")) {
        require(spec.param("trees", 1) >= 1.0, "trees must be >= 1");
      }
      break;
    case LearnerFamily::kBoosting: {
      if (spec.has_param("depth")) {
        require(spec.param("depth", 1) >= 1.0, "depth must be >= 1");
      }
      if (spec.has_param("rounds")) {
        require(spec.param("rounds", 1) >= 1.0, "rounds must be >= 1");
      }
      const double rate = spec.param("rate", 0.1);
      require(rate > 0.0 && rate <= 1.0, "rate must lie in (0, 1]");
      break;
    }
    case LearnerFamily::kGp:
      require(spec.param("lengthscale", 1.0) > 0.0, "lengthscale must be > 0");
      require(spec.param("variance", 1.0) > 0.0, "kernel variance must be > 0");
      require(spec.param("noise", 0.1) > 0.0, "noise variance must be > 0");
      break;
  }
}

Vector RegressionModel::predict(const Matrix& X) const {
  if (X.cols() != dim_) {
    throw DimensionError("predict: expected " + std::to_string(dim_) +
                         " columns, got " + std::to_string(X.cols()));
  }
  Vector out = predict_impl(X);
  if (!out.allFinite()) throw ConvergenceError("predict: non-finite prediction");
  return out;
}

double RegressionModel::predict_one(const Vector& x) const {
  return predict(Matrix(x.transpose()))[0];
}

namespace {

PenaltySpec penalty_from_spec(const LearnerSpec& spec, const Matrix& X,
                              const Vector& y, const Vector* weights,
                              Rng& rng) {
  if (spec.penalty == "none") return PenaltySpec::none();
  if (spec.penalty == "ridge") {
    return PenaltySpec::ridge(spec.param("lambda", 1e-3));
  }
  if (spec.has_param("lambda")) {
    return PenaltySpec::lasso(spec.param("lambda", 0.0));
  }
  // Tune lambda on the default path by 5-fold cross validation.
  std::vector<LearnerSpec> grid;
  for (const double lambda : default_lasso_grid(X, y, weights)) {
    grid.push_back(spec.with_param("lambda", lambda));
  }
  const LearnerSpec chosen =
      weights ? cross_validate_weighted(X, y, *weights, 5, grid, rng)
              : cross_validate(X, y, 5, grid, rng);
  return PenaltySpec::lasso(chosen.param("lambda", 0.0));
}

Index knn_k_from_spec(const LearnerSpec& spec, const Matrix& X,
                      const Vector& y, Rng& rng) {
  if (spec.has_param("k")) return static_cast<Index>(spec.param("k", 5));
  std::vector<LearnerSpec> grid;
  for (const double k : {1.0, 3.0, 5.0, 10.0, 20.0}) {
    if (static_cast<Index>(k) <= X.rows()) grid.push_back(spec.with_param("k", k));
  }
  if (grid.empty()) grid.push_back(spec.with_param("k", 1.0));
  const LearnerSpec chosen = cross_validate(X, y, 5, grid, rng);
  return static_cast<Index>(chosen.param("k", 5));
}

}  // namespace

RegressionModelPtr fit_regression(const LearnerSpec& spec, const Matrix& X,
                                  const Vector& y, const Vector* weights,
                                  Rng* rng) {
  validate(spec);
  Rng fallback(0x917fULL);
  Rng& stream = rng ? *rng : fallback;
  switch (spec.family) {
    case LearnerFamily::kLinear:
      return fit_linear(X, y, penalty_from_spec(spec, X, y, weights, stream),
                        weights);
    case LearnerFamily::kKnn:
      if (weights) throw InvalidArgumentError("fit_regression: knn does not take weights");
      return fit_knn(X, y, knn_k_from_spec(spec, X, y, stream));
    case LearnerFamily::kTree: {
      TreeOptions options;
      options.max_depth = static_cast<int>(spec.param("depth", 6));
      options.min_leaf = static_cast<Index>(spec.param("min_leaf", 1));
      return fit_tree(X, y, options, weights);
    }
    case LearnerFamily::kForest: {
      if (weights) throw InvalidArgumentError("fit_regression: forest does not take weights");
      ForestOptions options;
      options.trees = static_cast<int>(spec.param("trees", 200));
      options.max_depth = static_cast<int>(spec.param("depth", 8));
      options.min_leaf = static_cast<Index>(spec.param("min_leaf", 1));
      options.mtry = static_cast<Index>(spec.param("mtry", 0));
      options.bootstrap = spec.param("bootstrap", 1.0) != 0.0;
      return fit_forest(X, y, options, stream);
    }
    case LearnerFamily::kBoosting: {
      BoostingOptions options;
      options.rounds = static_cast<int>(spec.param("rounds", 200));
      options.rate = spec.param("rate", 0.1);
      options.max_depth = static_cast<int>(spec.param("depth", 3));
      options.min_leaf = static_cast<Index>(spec.param("min_leaf", 1));
      return fit_boosting(X, y, options, weights);
    }
    case LearnerFamily::kGp: {
      if (weights) throw InvalidArgumentError("fit_regression: gp does not take weights");
      GpOptions options;
      options.lengthscale = spec.param("lengthscale", 1.0);
      options.signal_variance = spec.param("variance", 1.0);
      options.noise_variance = spec.param("noise", 0.1);
      options.optimize = spec.param("optimize", 1.0) != 0.0;
      options.restarts = static_cast<int>(spec.param("restarts", 2));
      return fit_gp(X, y, options);
    }
  }
  throw InvalidArgumentError("fit_regression: unknown family");
}

std::vector<IndexVector> cv_fold_assignments(Index n, int folds, Rng& rng) {
  IndexVector order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  rng.shuffle(order);
  std::vector<IndexVector> out(static_cast<std::size_t>(folds));
  for (std::size_t i = 0; i < order.size(); ++i) {
    out[i % static_cast<std::size_t>(folds)].push_back(order[i]);
  }
  return out;
}

namespace {

LearnerSpec cross_validate_impl(const Matrix& X, const Vector& y,
                                const Vector* weights, int folds,
                                const std::vector<LearnerSpec>& grid,
                                Rng& rng) {
  if (folds < 2) throw InvalidArgumentError("cross_validate: need folds >= 2");
  if (grid.empty()) throw InvalidArgumentError("cross_validate: empty grid");
  const Index n = X.rows();
  if (n < folds) throw InvalidArgumentError("cross_validate: more folds than rows");

  const auto fold_sets = cv_fold_assignments(n, folds, rng);
  // One fold layout shared by every grid point; fits consume a per-fit
  // child stream so stochastic learners stay comparable across the grid.
  std::vector<std::pair<IndexVector, IndexVector>> layouts;
  for (const auto& fold : fold_sets) {
    IndexVector train;
    std::vector<bool> in_fold(static_cast<std::size_t>(n), false);
    for (const Index i : fold) in_fold[static_cast<std::size_t>(i)] = true;
    for (Index i = 0; i < n; ++i) {
      if (!in_fold[static_cast<std::size_t>(i)]) train.push_back(i);
    }
    layouts.emplace_back(std::move(train), fold);
  }

  double best_error = 0.0;
  std::size_t best = 0;
  bool have_best = false;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double total_error = 0.0;
    double total_weight = 0.0;
    for (std::size_t f = 0; f < layouts.size(); ++f) {
      const auto& [train, held] = layouts[f];
      if (train.empty() || held.empty()) continue;
      const Matrix x_train = slice_rows(X, train);
      const Vector y_train = slice(y, train);
      Vector w_train;
      const Vector* w_ptr = nullptr;
      if (weights) {
        w_train = slice(*weights, train);
        w_ptr = &w_train;
      }
      Rng fold_stream(0xc0ffeeULL + 1315423911ULL * (g + 1) + 2654435761ULL * f);
      const RegressionModelPtr model =
          fit_regression(grid[g], x_train, y_train, w_ptr, &fold_stream);
      const Vector prediction = model->predict(slice_rows(X, held));
      const Vector truth = slice(y, held);
      for (Index i = 0; i < prediction.size(); ++i) {
        const double wgt = weights ? (*weights)[held[static_cast<std::size_t>(i)]] : 1.0;
        const double err = prediction[i] - truth[i];
        total_error += wgt * err * err;
        total_weight += wgt;
      }
    }
    const double mean_error =
        total_weight > 0.0 ? total_error / total_weight
                           : std::numeric_limits<double>::infinity();
    if (!have_best || mean_error < best_error) {
      have_best = true;
      best_error = mean_error;
      best = g;
    }
  }
  return grid[best];
}

}  // namespace

LearnerSpec cross_validate(const Matrix& X, const Vector& y, int folds,
                           const std::vector<LearnerSpec>& grid, Rng& rng) {
  return cross_validate_impl(X, y, nullptr, folds, grid, rng);
}

LearnerSpec cross_validate_weighted(const Matrix& X, const Vector& y,
                                    const Vector& weights, int folds,
                                    const std::vector<LearnerSpec>& grid,
                                    Rng& rng) {
  return cross_validate_impl(X, y, &weights, folds, grid, rng);
}

}  // namespace hte
