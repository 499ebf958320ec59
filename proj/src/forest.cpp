#include <cmath>

#include "hte/errors.hpp"
#include "hte/learners.hpp"
#include "tree_internal.hpp"

namespace hte {
namespace {

class ForestModel final : public RegressionModel {
 public:
  ForestModel(Index dim, std::vector<detail::Tree> trees)
      : RegressionModel(dim), trees_(std::move(trees)) {}

 private:
  Vector predict_impl(const Matrix& X) const override {
    Vector out = Vector::Zero(X.rows());
    for (const auto& tree : trees_) out += tree.predict(X);
    return out / static_cast<double>(trees_.size());
  }
  std::vector<detail::Tree> trees_;
};

}  // namespace

Index default_mtry(Index d) {
  return static_cast<Index>(std::ceil(static_cast<double>(d) / 3.0));
}

RegressionModelPtr fit_forest(const Matrix& X, const Vector& y,
                              const ForestOptions& options, Rng& rng) {
  if (X.rows() != y.size()) throw DimensionError("fit_forest: X/y row mismatch");
  if (options.trees < 1) throw InvalidArgumentError("fit_forest: need trees >= 1");
  const Index n = X.rows();
  const Index d = X.cols();
  const Index mtry = options.mtry > 0 ? std::min(options.mtry, d)
                                      : std::min(default_mtry(d), d);
  const Vector w = Vector::Ones(n);

  detail::CartControl control;
  control.max_depth = options.max_depth;
  control.min_leaf = options.min_leaf;
  control.mtry = mtry;
  control.rng = &rng;

  std::vector<detail::Tree> trees;
  trees.reserve(static_cast<std::size_t>(options.trees));
  IndexVector rows(static_cast<std::size_t>(n));
  for (int t = 0; t < options.trees; ++t) {
    if (options.bootstrap) {
      for (auto& row : rows) {
        row = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
      }
    } else {
      for (Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
    }
    trees.push_back(detail::build_cart(X, y, w, rows, control));
  }
  return std::make_shared<ForestModel>(d, std::move(trees));
}

RegressionModelPtr fit_boosting(const Matrix& X, const Vector& y,
                                const BoostingOptions& options,
                                const Vector* weights) {
  if (X.rows() != y.size()) throw DimensionError("fit_boosting: X/y row mismatch");
  if (options.rounds < 1) throw InvalidArgumentError("fit_boosting: need rounds >= 1");
  if (!(options.rate > 0.0 && options.rate <= 1.0)) {
    throw InvalidArgumentError("fit_boosting: rate must lie in (0, 1]");
  }
  const Index n = X.rows();
  const Vector w = weights ? *weights : Vector::Ones(n);
  if (w.size() != n) throw DimensionError("fit_boosting: weight length mismatch");
  const double total_w = w.sum();
  if (!(total_w > 0.0)) throw InvalidArgumentError("fit_boosting: total weight must be positive");

  class BoostingModel final : public RegressionModel {
   public:
    BoostingModel(Index dim, double f0, double rate,
                  std::vector<detail::Tree> trees)
        : RegressionModel(dim), f0_(f0), rate_(rate), trees_(std::move(trees)) {}

   private:
    Vector predict_impl(const Matrix& X) const override {
      Vector out = Vector::Constant(X.rows(), f0_);
      for (const auto& tree : trees_) out += rate_ * tree.predict(X);
      return out;
    }
    double f0_;
    double rate_;
    std::vector<detail::Tree> trees_;
  };

  const double f0 = w.dot(y) / total_w;
  Vector current = Vector::Constant(n, f0);
  IndexVector rows(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;

  detail::CartControl control;
  control.max_depth = options.max_depth;
  control.min_leaf = options.min_leaf;

  std::vector<detail::Tree> trees;
  trees.reserve(static_cast<std::size_t>(options.rounds));
  for (int round = 0; round < options.rounds; ++round) {
    const Vector residual = y - current;
    detail::Tree tree = detail::build_cart(X, residual, w, rows, control);
    current += options.rate * tree.predict(X);
    trees.push_back(std::move(tree));
  }
  return std::make_shared<BoostingModel>(X.cols(), f0, options.rate,
                                         std::move(trees));
}

}  // namespace hte
