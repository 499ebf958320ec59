#include "hte/errors.hpp"
#include "hte/meta_learners.hpp"
#include "meta_common.hpp"

namespace hte {
namespace {

class SLearnerModel final : public CateModel {
 public:
  SLearnerModel(Index dim, RegressionModelPtr outcome, PropensityModelPtr ps)
      : CateModel(dim), outcome_(std::move(outcome)), ps_(std::move(ps)) {}

  CateFamily family() const override { return CateFamily::kS; }

 private:
  Vector predict_impl(const Matrix& X) const override {
    const Matrix base = detail::with_propensity_column(X, ps_);
    Matrix design(base.rows(), base.cols() + 1);
    design.leftCols(base.cols()) = base;
    design.col(base.cols()).setOnes();
    const Vector treated = outcome_->predict(design);
    design.col(base.cols()).setZero();
    const Vector control = outcome_->predict(design);
    return treated - control;
  }

  RegressionModelPtr outcome_;
  PropensityModelPtr ps_;
};

class TLearnerModel final : public CateModel {
 public:
  TLearnerModel(Index dim, RegressionModelPtr f0, RegressionModelPtr f1,
                PropensityModelPtr ps)
      : CateModel(dim), f0_(std::move(f0)), f1_(std::move(f1)), ps_(std::move(ps)) {}

  CateFamily family() const override { return CateFamily::kT; }

 private:
  Vector predict_impl(const Matrix& X) const override {
    const Matrix design = detail::with_propensity_column(X, ps_);
    return f1_->predict(design) - f0_->predict(design);
  }

  RegressionModelPtr f0_, f1_;
  PropensityModelPtr ps_;
};

}  // namespace

CateModelPtr fit_s_learner(const CausalDataset& data, const LearnerSpec& base,
                           const PropensityFit* ps, Rng* rng) {
  data.validate();
  const Matrix augmented =
      ps ? detail::with_propensity_values(data.covariates, ps->pi_hat)
         : data.covariates;
  Matrix design(augmented.rows(), augmented.cols() + 1);
  design.leftCols(augmented.cols()) = augmented;
  design.col(augmented.cols()) = data.treatment;  // treatment enters last
  RegressionModelPtr outcome =
      fit_regression(base, design, data.outcome, nullptr, rng);
  return std::make_shared<SLearnerModel>(data.dim(), std::move(outcome),
                                         ps ? ps->model : nullptr);
}

CateModelPtr fit_t_learner(const CausalDataset& data,
                           const LearnerSpec& base_control,
                           const LearnerSpec& base_treated,
                           const PropensityFit* ps, Rng* rng) {
  data.validate();
  const IndexVector treated = data.treated_indices();
  const IndexVector control = data.control_indices();
  if (treated.size() < 2 || control.size() < 2) {
    throw ArmTooSmallError("fit_t_learner: each arm needs at least 2 units");
  }
  const Matrix augmented =
      ps ? detail::with_propensity_values(data.covariates, ps->pi_hat)
         : data.covariates;
  RegressionModelPtr f0 =
      fit_regression(base_control, slice_rows(augmented, control),
                     slice(data.outcome, control), nullptr, rng);
  RegressionModelPtr f1 =
      fit_regression(base_treated, slice_rows(augmented, treated),
                     slice(data.outcome, treated), nullptr, rng);
  return std::make_shared<TLearnerModel>(data.dim(), std::move(f0),
                                         std::move(f1), ps ? ps->model : nullptr);
}

}  // namespace hte
