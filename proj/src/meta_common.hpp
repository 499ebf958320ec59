#pragma once

#include "hte/meta_learners.hpp"

namespace hte::detail {

/// Appends the clipped propensity column when a model was fitted with one.
inline Matrix with_propensity_column(const Matrix& X,
                                     const PropensityModelPtr& ps) {
  if (!ps) return X;
  Matrix out(X.rows(), X.cols() + 1);
  out.leftCols(X.cols()) = X;
  out.col(X.cols()) = ps->predict(X);
  return out;
}

/// Training-time variant using the already-computed per-unit estimates.
inline Matrix with_propensity_values(const Matrix& X, const Vector& pi_hat) {
  Matrix out(X.rows(), X.cols() + 1);
  out.leftCols(X.cols()) = X;
  out.col(X.cols()) = pi_hat;
  return out;
}

}  // namespace hte::detail
