#include "gp_core.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "hte/errors.hpp"

namespace hte::detail {

CholWithJitter chol_with_jitter(const Matrix& kernel, double noise_var) {
  CholWithJitter out;
  double jitter = 1e-6;
  while (jitter <= 1e-2 * (1.0 + 1e-12)) {
    Matrix k = kernel;
    k.diagonal().array() += noise_var + jitter;
    out.llt.compute(k);
    if (out.llt.info() == Eigen::Success) {
      out.jitter = jitter;
      return out;
    }
    jitter *= 10.0;
  }
  throw IllConditionedKernelError(
      "gp: kernel factorization failed after jitter escalation to 1e-2");
}

double gp_lml(const Eigen::LLT<Matrix>& llt, const Vector& y) {
  const Vector alpha = llt.solve(y);
  const double log_det =
      llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * y.dot(alpha) - log_det -
         0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi);
}

Vector gp_lml_grad(const Eigen::LLT<Matrix>& llt, const Vector& y,
                   const std::vector<Matrix>& kernel_grads) {
  const Index n = y.size();
  const Vector alpha = llt.solve(y);
  const Matrix k_inv = llt.solve(Matrix::Identity(n, n));
  Vector grad(static_cast<Index>(kernel_grads.size()));
  for (std::size_t j = 0; j < kernel_grads.size(); ++j) {
    const Matrix& dk = kernel_grads[j];
    const double data_term = alpha.dot(dk * alpha);
    const double trace_term = (k_inv.array() * dk.array()).sum();
    grad[static_cast<Index>(j)] = 0.5 * (data_term - trace_term);
  }
  return grad;
}

AscentResult maximize_with_restarts(const ValueGradFn& eval, const Vector& start,
                                    const Vector& lower, const Vector& upper,
                                    int max_iter) {
  auto clamp = [&](Vector v) {
    for (Index j = 0; j < v.size(); ++j) {
      v[j] = std::clamp(v[j], lower[j], upper[j]);
    }
    return v;
  };
  auto safe_eval = [&](const Vector& theta) -> std::pair<double, Vector> {
    try {
      return eval(theta);
    } catch (const IllConditionedKernelError&) {
      return {-std::numeric_limits<double>::infinity(),
              Vector::Zero(theta.size())};
    }
  };

  // Adam-style ascent follows the curved likelihood valleys that defeat a
  // plain backtracking step.
  Vector theta = clamp(start);
  auto [value, grad] = safe_eval(theta);
  AscentResult best{theta, value};
  Vector m = Vector::Zero(theta.size());
  Vector v = Vector::Zero(theta.size());
  const double rate = 0.08;
  int stale = 0;
  for (int iter = 0; iter < max_iter; ++iter) {
    if (!std::isfinite(value)) break;
    if (grad.lpNorm<Eigen::Infinity>() < 1e-6) break;
    m = 0.9 * m + 0.1 * grad;
    v = 0.999 * v.array() + 0.001 * grad.array().square();
    const double mc = 1.0 - std::pow(0.9, iter + 1);
    const double vc = 1.0 - std::pow(0.999, iter + 1);
    const Vector step =
        rate * (m / mc).array() / ((v / vc).array().sqrt() + 1e-8);
    theta = clamp(theta + step);
    std::tie(value, grad) = safe_eval(theta);
    if (value > best.value + 1e-10) {
      best = {theta, value};
      stale = 0;
    } else if (++stale > 50) {
      break;
    }
  }

  // Backtracking polish from the best point seen.
  theta = best.point;
  std::tie(value, grad) = safe_eval(theta);
  double step_len = 0.1;
  for (int iter = 0; iter < 40; ++iter) {
    Vector direction = grad;
    for (Index j = 0; j < theta.size(); ++j) {
      if ((theta[j] >= upper[j] && direction[j] > 0.0) ||
          (theta[j] <= lower[j] && direction[j] < 0.0)) {
        direction[j] = 0.0;
      }
    }
    const double norm = direction.norm();
    if (norm < 1e-8 || !std::isfinite(value)) break;
    bool moved = false;
    double t = step_len;
    for (int halving = 0; halving < 25; ++halving) {
      const Vector trial = clamp(theta + (t / norm) * direction);
      if ((trial - theta).norm() == 0.0) break;
      const auto [trial_value, trial_grad] = safe_eval(trial);
      if (trial_value > value + 1e-12) {
        theta = trial;
        value = trial_value;
        grad = trial_grad;
        step_len = std::min(t * 2.0, 1.0);
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  if (value > best.value) best = {theta, value};
  return best;
}

Matrix squared_distances(const Matrix& a, const Matrix& b) {
  const Vector a_sq = a.rowwise().squaredNorm();
  const Vector b_sq = b.rowwise().squaredNorm();
  Matrix out = -2.0 * a * b.transpose();
  out.colwise() += a_sq;
  out.rowwise() += b_sq.transpose();
  return out.cwiseMax(0.0);
}

}  // namespace hte::detail
