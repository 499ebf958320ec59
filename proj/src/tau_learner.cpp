#include <cmath>

#include "hte/errors.hpp"
#include "hte/meta_learners.hpp"
#include "meta_common.hpp"

namespace hte {

TauLearnerModel::TauLearnerModel(Index dim, RegressionModelPtr mu_model,
                                 RegressionModelPtr tau_model,
                                 PropensityModelPtr ps, int sweeps_used,
                                 std::vector<double> objective_trace)
    : CateModel(dim),
      mu_model_(std::move(mu_model)),
      tau_model_(std::move(tau_model)),
      ps_(std::move(ps)),
      sweeps_used_(sweeps_used),
      trace_(std::move(objective_trace)) {}

Vector TauLearnerModel::predict_impl(const Matrix& X) const {
  return tau_model_->predict(X);
}

const TauLearnerModel& as_tau_learner(const CateModel& model) {
  const auto* tau = dynamic_cast<const TauLearnerModel*>(&model);
  if (!tau) throw InvalidArgumentError("as_tau_learner: not a tau-learner model");
  return *tau;
}

CateModelPtr fit_tau_learner(const CausalDataset& data,
                             const LearnerSpec& base_mu,
                             const LearnerSpec& base_tau,
                             const Vector& pi_hat,
                             const TauLearnerOptions& options, Rng* rng) {
  data.validate();
  if (pi_hat.size() != data.n()) {
    throw DimensionError("fit_tau_learner: propensity length mismatch");
  }
  if (options.sweeps < 1) throw InvalidArgumentError("fit_tau_learner: need sweeps >= 1");
  const IndexVector treated = data.treated_indices();
  if (treated.size() < 2) {
    throw ArmTooSmallError("fit_tau_learner: treated arm needs at least 2 units");
  }

  const Matrix mu_design =
      detail::with_propensity_values(data.covariates, pi_hat);
  const Matrix x_treated = slice_rows(data.covariates, treated);

  Vector tau_hat = Vector::Zero(data.n());
  RegressionModelPtr mu_model, tau_model;
  std::vector<double> trace;
  int sweeps_used = 0;

  for (int sweep = 0; sweep < options.sweeps; ++sweep) {
    ++sweeps_used;
    const Vector mu_target = data.outcome - tau_hat.cwiseProduct(data.treatment);
    mu_model = fit_regression(base_mu, mu_design, mu_target, nullptr, rng);
    const Vector mu_hat = mu_model->predict(mu_design);

    const Vector tau_target = slice(data.outcome, treated) -
                              slice(mu_hat, treated);
    tau_model = fit_regression(base_tau, x_treated, tau_target, nullptr, rng);
    Vector updated = tau_model->predict(data.covariates);
    if (!updated.allFinite() || !mu_hat.allFinite()) {
      throw ConvergenceError("fit_tau_learner: backfitting diverged");
    }

    const Vector residual =
        data.outcome - mu_hat - updated.cwiseProduct(data.treatment);
    trace.push_back(residual.squaredNorm());

    const double delta = (updated - tau_hat).cwiseAbs().maxCoeff();
    tau_hat = std::move(updated);
    if (delta <= options.tol) break;
  }

  return std::make_shared<TauLearnerModel>(
      data.dim(), std::move(mu_model), std::move(tau_model), nullptr,
      sweeps_used, std::move(trace));
}

}  // namespace hte
