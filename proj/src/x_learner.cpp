#include "hte/errors.hpp"
#include "hte/meta_learners.hpp"

namespace hte {

XLearnerModel::XLearnerModel(Index dim, RegressionModelPtr outcome0,
                             RegressionModelPtr outcome1,
                             RegressionModelPtr tau0, RegressionModelPtr tau1,
                             XWeightMode mode, PropensityModelPtr weight_model)
    : CateModel(dim),
      outcome0_(std::move(outcome0)),
      outcome1_(std::move(outcome1)),
      tau0_(std::move(tau0)),
      tau1_(std::move(tau1)),
      mode_(mode),
      weight_model_(std::move(weight_model)) {}

Vector XLearnerModel::weights(const Matrix& X) const {
  switch (mode_) {
    case XWeightMode::kOne:
      return Vector::Ones(X.rows());
    case XWeightMode::kZero:
      return Vector::Zero(X.rows());
    case XWeightMode::kPropensity:
      return weight_model_->predict(X);
  }
  return Vector::Zero(X.rows());
}

Vector XLearnerModel::predict_impl(const Matrix& X) const {
  const Vector g = weights(X);
  const Vector t0 = tau0_->predict(X);
  const Vector t1 = tau1_->predict(X);
  return g.cwiseProduct(t0) + (Vector::Ones(X.rows()) - g).cwiseProduct(t1);
}

const XLearnerModel& as_x_learner(const CateModel& model) {
  const auto* x = dynamic_cast<const XLearnerModel*>(&model);
  if (!x) throw InvalidArgumentError("as_x_learner: not an X-learner model");
  return *x;
}

CateModelPtr fit_x_learner(const CausalDataset& data, const LearnerSpec& base,
                           const PropensityFit* ps, XWeightMode weight_mode,
                           Rng* rng) {
  data.validate();
  if (weight_mode == XWeightMode::kPropensity && (!ps || !ps->model)) {
    throw InvalidArgumentError("fit_x_learner: propensity weighting needs a propensity fit");
  }
  const IndexVector treated = data.treated_indices();
  const IndexVector control = data.control_indices();
  if (treated.size() < 2 || control.size() < 2) {
    throw ArmTooSmallError("fit_x_learner: each arm needs at least 2 units");
  }

  const Matrix x_treated = slice_rows(data.covariates, treated);
  const Matrix x_control = slice_rows(data.covariates, control);
  const Vector y_treated = slice(data.outcome, treated);
  const Vector y_control = slice(data.outcome, control);

  // Stage 1: group-specific outcome surfaces.
  RegressionModelPtr f0 = fit_regression(base, x_control, y_control, nullptr, rng);
  RegressionModelPtr f1 = fit_regression(base, x_treated, y_treated, nullptr, rng);

  // Stage 2: imputed treatment effects.
  const Vector d1 = y_treated - f0->predict(x_treated);
  const Vector d0 = f1->predict(x_control) - y_control;

  // Stage 3: group-specific CATE regressions.
  RegressionModelPtr tau1 = fit_regression(base, x_treated, d1, nullptr, rng);
  RegressionModelPtr tau0 = fit_regression(base, x_control, d0, nullptr, rng);

  return std::make_shared<XLearnerModel>(
      data.dim(), std::move(f0), std::move(f1), std::move(tau0),
      std::move(tau1), weight_mode, ps ? ps->model : nullptr);
}

}  // namespace hte
