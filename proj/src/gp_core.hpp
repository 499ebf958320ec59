#pragma once

#include <functional>

#include "hte/types.hpp"

namespace hte::detail {

struct CholWithJitter {
  Eigen::LLT<Matrix> llt;
  double jitter = 0.0;
};

/// Factorizes K + noise*I + jitter*I, escalating the jitter from 1e-6 by
/// factors of 10 up to 1e-2; throws IllConditionedKernelError beyond that.
CholWithJitter chol_with_jitter(const Matrix& kernel, double noise_var);

/// -1/2 y'a - sum(log diag L) - n/2 log(2*pi).
double gp_lml(const Eigen::LLT<Matrix>& llt, const Vector& y);

/// Gradient entries 1/2 a'(dK)a - 1/2 tr(K^-1 dK) for each dK.
Vector gp_lml_grad(const Eigen::LLT<Matrix>& llt, const Vector& y,
                   const std::vector<Matrix>& kernel_grads);

struct AscentResult {
  Vector point;
  double value = 0.0;
};

using ValueGradFn = std::function<std::pair<double, Vector>(const Vector&)>;

/// Projected gradient ascent with backtracking line search.
AscentResult maximize_with_restarts(const ValueGradFn& eval, const Vector& start,
                                    const Vector& lower, const Vector& upper,
                                    int max_iter);

/// Pairwise squared Euclidean distances.
Matrix squared_distances(const Matrix& a, const Matrix& b);

}  // namespace hte::detail
