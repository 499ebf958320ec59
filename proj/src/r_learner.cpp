#include <cmath>

#include "hte/errors.hpp"
#include "hte/meta_learners.hpp"

namespace hte {
namespace {

constexpr double kResidualFloor = 1e-6;

class RLearnerModel final : public CateModel {
 public:
  RLearnerModel(Index dim, RegressionModelPtr tau_model)
      : CateModel(dim), tau_model_(std::move(tau_model)) {}

  CateFamily family() const override { return CateFamily::kR; }

 private:
  Vector predict_impl(const Matrix& X) const override {
    return tau_model_->predict(X);
  }
  RegressionModelPtr tau_model_;
};

/// Cross-fitted conditional-mean outcome m(x).
Vector cross_fitted_m(const CausalDataset& data, const LearnerSpec& m_spec,
                      int folds, Rng& rng) {
  const Index n = data.n();
  const auto fold_sets = cv_fold_assignments(n, folds, rng);
  Vector m_hat(n);
  for (const auto& held : fold_sets) {
    if (held.empty()) continue;
    IndexVector train;
    std::vector<bool> mask(static_cast<std::size_t>(n), false);
    for (const Index i : held) mask[static_cast<std::size_t>(i)] = true;
    for (Index i = 0; i < n; ++i) {
      if (!mask[static_cast<std::size_t>(i)]) train.push_back(i);
    }
    Rng fold_rng(rng.next_u64());
    const auto model =
        fit_regression(m_spec, slice_rows(data.covariates, train),
                       slice(data.outcome, train), nullptr, &fold_rng);
    const Vector fold_m = model->predict(slice_rows(data.covariates, held));
    for (std::size_t k = 0; k < held.size(); ++k) {
      m_hat[held[k]] = fold_m[static_cast<Index>(k)];
    }
  }
  return m_hat;
}

LearnerSpec tune_base_tau(const LearnerSpec& base_tau, const Matrix& X,
                          const Vector& pseudo, const Vector& weights,
                          Rng& rng) {
  std::vector<LearnerSpec> grid;
  if (base_tau.family == LearnerFamily::kLinear && base_tau.penalty == "lasso" &&
      !base_tau.has_param("lambda")) {
    for (const double lambda : default_lasso_grid(X, pseudo, &weights)) {
      grid.push_back(base_tau.with_param("lambda", lambda));
    }
  } else if (base_tau.family == LearnerFamily::kBoosting &&
             !base_tau.has_param("depth")) {
    for (const double depth : {1.0, 2.0, 3.0}) {
      grid.push_back(base_tau.with_param("depth", depth));
    }
  } else {
    return base_tau;
  }
  return cross_validate_weighted(X, pseudo, weights, 5, grid, rng);
}

}  // namespace

RLearnerLossParts r_learner_loss_parts(const Vector& y, const Vector& z,
                                       const Vector& m_hat,
                                       const Vector& pi_hat) {
  const Index n = y.size();
  if (z.size() != n || m_hat.size() != n || pi_hat.size() != n) {
    throw DimensionError("r_learner_loss_parts: length mismatch");
  }
  RLearnerLossParts parts;
  parts.residual_outcome = y - m_hat;
  parts.residual_treatment = z - pi_hat;
  parts.weights.resize(n);
  parts.pseudo_target.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double rt = parts.residual_treatment[i];
    if (std::abs(rt) < kResidualFloor) {
      parts.weights[i] = 0.0;
      parts.pseudo_target[i] = 0.0;
    } else {
      parts.weights[i] = rt * rt;
      parts.pseudo_target[i] = parts.residual_outcome[i] / rt;
    }
  }
  return parts;
}

CateModelPtr fit_r_learner_with_nuisance(const CausalDataset& data,
                                         const LearnerSpec& base_tau,
                                         const Vector& m_hat,
                                         const Vector& pi_hat, Rng* rng) {
  data.validate();
  const RLearnerLossParts parts =
      r_learner_loss_parts(data.outcome, data.treatment, m_hat, pi_hat);

  IndexVector kept;
  for (Index i = 0; i < data.n(); ++i) {
    if (parts.weights[i] > 0.0) kept.push_back(i);
  }
  if (kept.size() < 2) {
    throw InvalidArgumentError("fit_r_learner: too few units with nonzero weight");
  }
  const Matrix X = slice_rows(data.covariates, kept);
  const Vector pseudo = slice(parts.pseudo_target, kept);
  const Vector weights = slice(parts.weights, kept);

  Rng fallback(0x7157ULL);
  Rng& stream = rng ? *rng : fallback;
  const LearnerSpec tuned = tune_base_tau(base_tau, X, pseudo, weights, stream);
  RegressionModelPtr tau_model =
      fit_regression(tuned, X, pseudo, &weights, &stream);
  return std::make_shared<RLearnerModel>(data.dim(), std::move(tau_model));
}

CateModelPtr fit_r_learner(const CausalDataset& data,
                           const LearnerSpec& base_tau,
                           const LearnerSpec& m_spec,
                           const RLearnerOptions& options,
                           const SeedTree& node) {
  data.validate();
  if (options.folds < 2) throw InvalidArgumentError("fit_r_learner: need folds >= 2");

  PropensityOptions ps_options = options.propensity;
  ps_options.folds = options.folds;
  Rng ps_rng = derive_stream(node, "propensity");
  const PropensityFit ps = estimate_propensity(data, ps_options, ps_rng);

  Rng m_rng = derive_stream(node, "outcome-mean");
  const Vector m_hat = cross_fitted_m(data, m_spec, options.folds, m_rng);

  Rng tau_rng = derive_stream(node, "tau");
  return fit_r_learner_with_nuisance(data, base_tau, m_hat, ps.pi_hat,
                                     &tau_rng);
}

}  // namespace hte
