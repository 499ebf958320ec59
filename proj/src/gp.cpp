#include <cmath>

#include "gp_core.hpp"
#include "hte/errors.hpp"
#include "hte/learners.hpp"

namespace hte {
namespace {

constexpr Index kDenseGuard = 5000;

Matrix rbf_kernel(const Matrix& d2, double lengthscale, double variance) {
  return variance * (-d2 / (2.0 * lengthscale * lengthscale)).array().exp();
}

struct Objective {
  const Matrix& d2;
  const Vector& y;

  // theta = (log lengthscale, log signal variance, log noise variance).
  std::pair<double, Vector> operator()(const Vector& theta) const {
    const double len = std::exp(theta[0]);
    const double var = std::exp(theta[1]);
    const double noise = std::exp(theta[2]);
    const Matrix k = rbf_kernel(d2, len, var);
    const auto chol = detail::chol_with_jitter(k, noise);
    const double lml = detail::gp_lml(chol.llt, y);
    std::vector<Matrix> grads;
    grads.reserve(3);
    grads.push_back(k.cwiseProduct(d2 / (len * len)));  // d/d log len
    grads.push_back(k);                                 // d/d log var
    grads.push_back(noise *
                    Matrix::Identity(y.size(), y.size()));  // d/d log noise
    return {lml, detail::gp_lml_grad(chol.llt, y, grads)};
  }
};

}  // namespace

GpRegression::GpRegression(Matrix X, Vector alpha, Matrix chol_lower,
                           double lengthscale, double signal_variance,
                           double noise_variance, double lml)
    : RegressionModel(X.cols()),
      train_(std::move(X)),
      alpha_(std::move(alpha)),
      chol_lower_(std::move(chol_lower)),
      lengthscale_(lengthscale),
      signal_variance_(signal_variance),
      noise_variance_(noise_variance),
      lml_(lml) {}

Vector GpRegression::predict_impl(const Matrix& X) const {
  const Matrix cross =
      rbf_kernel(detail::squared_distances(train_, X), lengthscale_,
                 signal_variance_);
  return cross.transpose() * alpha_;
}

Vector GpRegression::predict_variance(const Matrix& X) const {
  if (X.cols() != input_dim()) throw DimensionError("gp: column count mismatch");
  const Matrix cross =
      rbf_kernel(detail::squared_distances(train_, X), lengthscale_,
                 signal_variance_);
  Matrix v = cross;
  chol_lower_.triangularView<Eigen::Lower>().solveInPlace(v);
  Vector out(X.rows());
  for (Index i = 0; i < X.rows(); ++i) {
    out[i] = std::max(0.0, signal_variance_ - v.col(i).squaredNorm());
  }
  return out;
}

std::pair<double, Eigen::Vector3d> gp_log_marginal(const Matrix& X,
                                                   const Vector& y,
                                                   double log_lengthscale,
                                                   double log_signal_variance,
                                                   double log_noise_variance) {
  const Matrix d2 = detail::squared_distances(X, X);
  Vector theta(3);
  theta << log_lengthscale, log_signal_variance, log_noise_variance;
  const auto [value, grad] = Objective{d2, y}(theta);
  return {value, Eigen::Vector3d(grad[0], grad[1], grad[2])};
}

GpRegressionPtr fit_gp(const Matrix& X, const Vector& y,
                       const GpOptions& options) {
  if (X.rows() != y.size()) throw DimensionError("fit_gp: X/y row mismatch");
  if (X.rows() > kDenseGuard) {
    throw InvalidArgumentError("fit_gp: n exceeds the dense factorization guard (5000)");
  }
  if (!(options.noise_variance > 0.0)) {
    throw InvalidArgumentError("fit_gp: noise variance must be positive");
  }
  if (!(options.lengthscale > 0.0) || !(options.signal_variance > 0.0)) {
    throw InvalidArgumentError("fit_gp: kernel hyperparameters must be positive");
  }

  const Matrix d2 = detail::squared_distances(X, X);
  double len = options.lengthscale;
  double var = options.signal_variance;
  double noise = options.noise_variance;
  double lml;

  if (options.optimize) {
    const Objective objective{d2, y};
    Vector lower(3), upper(3);
    lower << std::log(1e-2), std::log(1e-8), std::log(1e-8);
    upper << std::log(1e3), std::log(1e6), std::log(1e4);

    Vector start(3);
    start << std::log(len), std::log(var), std::log(noise);
    auto best = detail::maximize_with_restarts(objective, start, lower, upper, 80);

    Rng rng(options.restart_seed);
    const double y_scale = std::max(1e-6, y.array().abs2().mean());
    for (int r = 0; r < options.restarts; ++r) {
      Vector draw(3);
      draw << rng.uniform(std::log(0.1), std::log(10.0)),
          rng.uniform(std::log(0.1 * y_scale), std::log(10.0 * y_scale)),
          rng.uniform(std::log(1e-4 * y_scale), std::log(y_scale));
      const auto candidate =
          detail::maximize_with_restarts(objective, draw, lower, upper, 80);
      if (candidate.value > best.value) best = candidate;
    }
    len = std::exp(best.point[0]);
    var = std::exp(best.point[1]);
    noise = std::exp(best.point[2]);
  }

  const Matrix k = rbf_kernel(d2, len, var);
  const auto chol = detail::chol_with_jitter(k, noise);
  lml = detail::gp_lml(chol.llt, y);
  Vector alpha = chol.llt.solve(y);
  Matrix lower_factor = chol.llt.matrixL();
  return GpRegressionPtr(new GpRegression(X, std::move(alpha),
                                          std::move(lower_factor), len, var,
                                          noise, lml));
}

}  // namespace hte
