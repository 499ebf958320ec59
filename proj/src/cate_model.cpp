#include <cmath>

#include "hte/errors.hpp"
#include "hte/meta_learners.hpp"

namespace hte {

std::string to_string(CateFamily family) {
  switch (family) {
    case CateFamily::kS: return "s";
    case CateFamily::kT: return "t";
    case CateFamily::kX: return "x";
    case CateFamily::kR: return "r";
    case CateFamily::kMultitask: return "mt";
    case CateFamily::kTau: return "tau";
    case CateFamily::kCausalForest: return "cf";
  }
  return "unknown";
}

CateFamily cate_family_from_string(std::string_view name) {
  if (name == "s") return CateFamily::kS;
  if (name == "t") return CateFamily::kT;
  if (name == "x") return CateFamily::kX;
  if (name == "r") return CateFamily::kR;
  if (name == "mt" || name == "multitask") return CateFamily::kMultitask;
  if (name == "tau") return CateFamily::kTau;
  if (name == "cf" || name == "causal_forest") return CateFamily::kCausalForest;
  throw InvalidArgumentError("unknown meta-learner family '" + std::string(name) + "'");
}

Vector CateModel::predict(const Matrix& X) const {
  if (X.cols() != dim_) {
    throw DimensionError("predict_cate: expected " + std::to_string(dim_) +
                         " columns, got " + std::to_string(X.cols()));
  }
  Vector out = predict_impl(X);
  if (!out.allFinite()) throw ConvergenceError("predict_cate: non-finite estimate");
  return out;
}

Vector CateModel::predict_variance(const Matrix& X) const {
  if (!has_variance()) {
    throw InvalidArgumentError("predict_cate_variance: family '" +
                               to_string(family()) +
                               "' does not expose a variance");
  }
  if (X.cols() != dim_) throw DimensionError("predict_cate_variance: column count mismatch");
  return variance_impl(X);
}

Vector CateModel::variance_impl(const Matrix&) const {
  throw InvalidArgumentError("predict_cate_variance: not available");
}

Vector predict_cate(const CateModel& model, const Matrix& X) {
  return model.predict(X);
}

Vector predict_cate_variance(const CateModel& model, const Matrix& X) {
  return model.predict_variance(X);
}

CausalDataset augment_with_propensity(const CausalDataset& data,
                                      const Vector& pi_hat) {
  if (pi_hat.size() != data.n()) {
    throw DimensionError("augment_with_propensity: length mismatch");
  }
  return data.with_column(kPropensityColumn, pi_hat);
}

std::pair<LearnerSpec, LearnerSpec> default_tau_learner_specs(
    const LearnerSpec& base) {
  LearnerSpec mu = base;
  LearnerSpec tau = base;
  switch (base.family) {
    case LearnerFamily::kLinear: {
      const double mu_lambda = base.param("lambda", 1e-3);
      if (mu.penalty == "none") {
        tau.penalty = "ridge";
        tau.params["lambda"] = 10.0 * mu_lambda;
      } else {
        mu.params["lambda"] = mu_lambda;
        tau.params["lambda"] = 10.0 * mu_lambda;
      }
      break;
    }
    case LearnerFamily::kTree:
    case LearnerFamily::kForest:
    case LearnerFamily::kBoosting:
      mu.params["depth"] = base.param("depth", 5.0);
      tau.params["depth"] = 2.0;
      break;
    case LearnerFamily::kKnn:
    case LearnerFamily::kGp:
      break;
  }
  return {mu, tau};
}

CateModelPtr fit_cate_model(const MetaLearnerConfig& config,
                            const CausalDataset& data,
                            const PropensityFit* ps, const SeedTree& node) {
  const PropensityFit* maybe_ps = config.use_ps ? ps : nullptr;
  Rng rng = node.child("fit").stream();
  switch (config.family) {
    case CateFamily::kS:
      return fit_s_learner(data, config.base, maybe_ps, &rng);
    case CateFamily::kT:
      return fit_t_learner(data, config.base_control.value_or(config.base),
                           config.base_treated.value_or(config.base),
                           maybe_ps, &rng);
    case CateFamily::kX: {
      const PropensityFit* weight_ps =
          config.weight_mode == XWeightMode::kPropensity ? ps : maybe_ps;
      return fit_x_learner(data, config.base, weight_ps, config.weight_mode,
                           &rng);
    }
    case CateFamily::kR: {
      RLearnerOptions options;
      options.folds = config.folds;
      options.propensity = config.propensity;
      LearnerSpec m_spec = config.m_spec.value_or(config.base);
      return fit_r_learner(data, config.base, m_spec, options, node);
    }
    case CateFamily::kMultitask: {
      MultitaskGpOptions options;
      options.lengthscale = config.base.param("lengthscale", 1.0);
      options.noise_variance = config.base.param("noise", 0.1);
      options.optimize = config.base.param("optimize", 1.0) != 0.0;
      options.restarts = static_cast<int>(config.base.param("restarts", 3));
      return fit_multitask_gp(data, options, rng, maybe_ps);
    }
    case CateFamily::kTau: {
      if (!ps) {
        throw InvalidArgumentError("fit_cate_model: the tau-learner needs a propensity fit");
      }
      auto [mu_spec, tau_spec] = default_tau_learner_specs(config.base);
      if (config.tau_spec) tau_spec = *config.tau_spec;
      TauLearnerOptions options;
      options.sweeps = config.sweeps;
      options.tol = config.tol;
      return fit_tau_learner(data, mu_spec, tau_spec, ps->pi_hat, options, &rng);
    }
    case CateFamily::kCausalForest: {
      CausalForestOptions options;
      options.trees = static_cast<int>(config.base.param("trees", 200));
      options.max_depth = static_cast<int>(config.base.param("depth", 8));
      options.min_leaf = static_cast<Index>(config.base.param("min_leaf", 5));
      options.mtry = static_cast<Index>(config.base.param("mtry", 0));
      options.bootstrap = config.base.param("bootstrap", 1.0) != 0.0;
      return fit_causal_forest(data, options, rng, maybe_ps);
    }
  }
  throw InvalidArgumentError("fit_cate_model: unknown family");
}

}  // namespace hte
