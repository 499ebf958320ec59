#include <cmath>

#include "hte/errors.hpp"
#include "hte/learners.hpp"

namespace hte {
namespace {

constexpr double kProbFloor = 1e-12;
constexpr double kGradTol = 1e-8;
constexpr int kMaxNewton = 200;

double sigmoid(double eta) {
  if (eta >= 0.0) {
    return 1.0 / (1.0 + std::exp(-eta));
  }
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

Vector probabilities(const Matrix& design, const Vector& beta) {
  Vector p = design * beta;
  for (Index i = 0; i < p.size(); ++i) {
    p[i] = std::clamp(sigmoid(p[i]), kProbFloor, 1.0 - kProbFloor);
  }
  return p;
}

double penalized_loglik(const Matrix& design, const Vector& z,
                        const Vector& beta, double l2) {
  const Vector p = probabilities(design, beta);
  double ll = 0.0;
  for (Index i = 0; i < z.size(); ++i) {
    ll += z[i] * std::log(p[i]) + (1.0 - z[i]) * std::log(1.0 - p[i]);
  }
  return ll - 0.5 * l2 * beta.tail(beta.size() - 1).squaredNorm();
}

}  // namespace

ClassifierModel::ClassifierModel(Vector beta, Index dim, double l2)
    : beta_(std::move(beta)), dim_(dim), l2_(l2) {}

Vector ClassifierModel::prob(const Matrix& X) const {
  if (X.cols() != dim_) throw DimensionError("classifier: column count mismatch");
  Matrix design(X.rows(), dim_ + 1);
  design.col(0).setOnes();
  design.rightCols(dim_) = X;
  return probabilities(design, beta_);
}

double ClassifierModel::prob_one(const Vector& x) const {
  return prob(Matrix(x.transpose()))[0];
}

ClassifierModelPtr fit_classifier(const Matrix& X, const Vector& z,
                                  double l2) {
  const Index n = X.rows();
  const Index d = X.cols();
  if (z.size() != n) throw DimensionError("fit_classifier: X/z row mismatch");
  bool saw_zero = false, saw_one = false;
  for (Index i = 0; i < n; ++i) {
    if (z[i] == 0.0) saw_zero = true;
    else if (z[i] == 1.0) saw_one = true;
    else throw InvalidArgumentError("fit_classifier: labels must be 0 or 1");
  }
  if (!saw_zero || !saw_one) {
    throw InvalidArgumentError("fit_classifier: both classes must be present");
  }
  const double ridge = std::max(l2, 1e-6);

  Matrix design(n, d + 1);
  design.col(0).setOnes();
  design.rightCols(d) = X;

  Vector beta = Vector::Zero(d + 1);
  double objective = penalized_loglik(design, z, beta, ridge);
  for (int iter = 0; iter < kMaxNewton; ++iter) {
    const Vector p = probabilities(design, beta);
    Vector grad = design.transpose() * (z - p);
    grad.tail(d) -= ridge * beta.tail(d);
    if (grad.norm() <= kGradTol) {
      return std::make_shared<ClassifierModel>(std::move(beta), d, ridge);
    }
    const Vector wvec = p.array() * (1.0 - p.array());
    Matrix hessian = design.transpose() * wvec.asDiagonal() * design;
    hessian.bottomRightCorner(d, d).diagonal().array() += ridge;
    const Vector newton = hessian.ldlt().solve(grad);

    auto line_search = [&](const Vector& direction) {
      double step = 1.0;
      for (int halving = 0; halving < 60; ++halving) {
        const Vector trial = beta + step * direction;
        const double value = penalized_loglik(design, z, trial, ridge);
        if (value > objective) {
          beta = trial;
          objective = value;
          return true;
        }
        step *= 0.5;
      }
      return false;
    };

    bool moved = newton.allFinite() && line_search(newton);
    if (!moved) moved = line_search(grad);
    if (!moved) {
      // No ascent direction improves the objective at double precision;
      // the optimum is resolved as sharply as it can be.
      return std::make_shared<ClassifierModel>(std::move(beta), d, ridge);
    }
  }
  throw ConvergenceError("fit_classifier: no convergence after 200 iterations");
}

}  // namespace hte
