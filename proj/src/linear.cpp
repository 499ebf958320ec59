#include <cmath>

#include "hte/errors.hpp"
#include "hte/learners.hpp"

namespace hte {
namespace {

constexpr double kLassoTol = 1e-8;
constexpr int kLassoMaxSweeps = 100000;

class LinearModel final : public RegressionModel {
 public:
  LinearModel(Index dim, LinearCoefficients coef)
      : RegressionModel(dim), coef_(std::move(coef)) {}

  const LinearCoefficients& coefficients() const { return coef_; }

 private:
  Vector predict_impl(const Matrix& X) const override {
    return (X * coef_.slopes).array() + coef_.intercept;
  }

  LinearCoefficients coef_;
};

struct CenteredDesign {
  Matrix Xc;
  Vector yc;
  Vector row_weights;   // normalized to mean 1
  Vector column_means;
  double y_mean = 0.0;
  double total_weight = 0.0;
};

CenteredDesign center(const Matrix& X, const Vector& y, const Vector* weights) {
  CenteredDesign out;
  const Index n = X.rows();
  if (weights) {
    if (weights->size() != n) throw DimensionError("fit_linear: weight length mismatch");
    if ((weights->array() < 0.0).any()) {
      throw InvalidArgumentError("fit_linear: negative weight");
    }
    out.row_weights = *weights;
  } else {
    out.row_weights = Vector::Ones(n);
  }
  out.total_weight = out.row_weights.sum();
  if (!(out.total_weight > 0.0)) {
    throw InvalidArgumentError("fit_linear: total weight must be positive");
  }
  out.column_means = (X.transpose() * out.row_weights) / out.total_weight;
  out.y_mean = out.row_weights.dot(y) / out.total_weight;
  out.Xc = X.rowwise() - out.column_means.transpose();
  out.yc = y.array() - out.y_mean;
  return out;
}

LinearCoefficients solve_ols(const Matrix& X, const Vector& y,
                             const Vector* weights) {
  const Index n = X.rows();
  const Index d = X.cols();
  Matrix design(n, d + 1);
  design.col(0).setOnes();
  design.rightCols(d) = X;
  Vector target = y;
  if (weights) {
    const Vector root = weights->cwiseSqrt();
    design.array().colwise() *= root.array();
    target.array() *= root.array();
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(design);
  if (qr.rank() < d + 1) {
    throw SingularDesignError("fit_linear: design is rank deficient after intercept augmentation");
  }
  const Vector beta = qr.solve(target);
  LinearCoefficients coef;
  coef.intercept = beta[0];
  coef.slopes = beta.tail(d);
  return coef;
}

LinearCoefficients solve_ridge(const Matrix& X, const Vector& y, double lambda,
                               const Vector* weights) {
  const CenteredDesign c = center(X, y, weights);
  const Index d = X.cols();
  const Matrix weighted = c.Xc.array().colwise() * c.row_weights.array();
  Matrix gram = (c.Xc.transpose() * weighted) / c.total_weight;
  gram.diagonal().array() += lambda;
  const Vector rhs = (weighted.transpose() * c.yc) / c.total_weight;
  LinearCoefficients coef;
  coef.slopes = gram.ldlt().solve(rhs);
  coef.intercept = c.y_mean - c.column_means.dot(coef.slopes);
  return coef;
}

double soft_threshold(double value, double amount) {
  if (value > amount) return value - amount;
  if (value < -amount) return value + amount;
  return 0.0;
}

LinearCoefficients solve_lasso(const Matrix& X, const Vector& y, double lambda,
                               const Vector* weights) {
  const CenteredDesign c = center(X, y, weights);
  const Index d = X.cols();
  const Vector w = c.row_weights;
  Vector col_sq(d);
  for (Index j = 0; j < d; ++j) {
    col_sq[j] = w.dot(c.Xc.col(j).cwiseAbs2()) / c.total_weight;
  }
  Vector beta = Vector::Zero(d);
  Vector residual = c.yc;
  for (int sweep = 0; sweep < kLassoMaxSweeps; ++sweep) {
    double max_change = 0.0;
    for (Index j = 0; j < d; ++j) {
      if (col_sq[j] <= 0.0) continue;
      const double rho =
          (c.Xc.col(j).cwiseProduct(w).dot(residual)) / c.total_weight +
          col_sq[j] * beta[j];
      const double updated = soft_threshold(rho, lambda) / col_sq[j];
      const double change = updated - beta[j];
      if (change != 0.0) {
        residual -= c.Xc.col(j) * change;
        beta[j] = updated;
        max_change = std::max(max_change, std::abs(change));
      }
    }
    if (max_change <= kLassoTol) break;
  }
  LinearCoefficients coef;
  coef.slopes = std::move(beta);
  coef.intercept = c.y_mean - c.column_means.dot(coef.slopes);
  return coef;
}

}  // namespace

RegressionModelPtr fit_linear(const Matrix& X, const Vector& y,
                              const PenaltySpec& penalty,
                              const Vector* weights) {
  if (X.rows() != y.size()) throw DimensionError("fit_linear: X/y row mismatch");
  if (X.rows() < 2) throw InvalidArgumentError("fit_linear: need at least 2 rows");
  if (penalty.kind != PenaltySpec::Kind::kNone && penalty.lambda < 0.0) {
    throw InvalidArgumentError("fit_linear: penalty must be non-negative");
  }
  LinearCoefficients coef;
  switch (penalty.kind) {
    case PenaltySpec::Kind::kNone:
      coef = solve_ols(X, y, weights);
      break;
    case PenaltySpec::Kind::kRidge:
      coef = solve_ridge(X, y, penalty.lambda, weights);
      break;
    case PenaltySpec::Kind::kLasso:
      coef = solve_lasso(X, y, penalty.lambda, weights);
      break;
  }
  return std::make_shared<LinearModel>(X.cols(), std::move(coef));
}

const LinearCoefficients& linear_coefficients(const RegressionModel& model) {
  const auto* linear = dynamic_cast<const LinearModel*>(&model);
  if (!linear) throw InvalidArgumentError("linear_coefficients: not a linear model");
  return linear->coefficients();
}

double lasso_lambda_max(const Matrix& X, const Vector& y,
                        const Vector* weights) {
  const CenteredDesign c = center(X, y, weights);
  double best = 0.0;
  for (Index j = 0; j < X.cols(); ++j) {
    const double corr =
        std::abs(c.Xc.col(j).cwiseProduct(c.row_weights).dot(c.yc)) /
        c.total_weight;
    best = std::max(best, corr);
  }
  return best;
}

std::vector<double> default_lasso_grid(const Matrix& X, const Vector& y,
                                       const Vector* weights) {
  const double top = lasso_lambda_max(X, y, weights);
  if (!(top > 0.0)) return {0.0};
  std::vector<double> grid;
  grid.reserve(50);
  const double ratio = std::pow(1e-4, 1.0 / 49.0);
  double lambda = top;
  for (int i = 0; i < 50; ++i) {
    grid.push_back(lambda);
    lambda *= ratio;
  }
  return grid;
}

}  // namespace hte
