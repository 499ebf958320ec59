#pragma once

#include <memory>
#include <optional>
#include <string>

#include "hte/dataset.hpp"
#include "hte/learners.hpp"
#include "hte/propensity.hpp"
#include "hte/rng.hpp"

namespace hte {

enum class CateFamily { kS, kT, kX, kR, kMultitask, kTau, kCausalForest };

std::string to_string(CateFamily family);
CateFamily cate_family_from_string(std::string_view name);

/// A fitted CATE estimator with a uniform tau(x) contract. Prediction
/// inputs use the raw covariate dimension; models that were fitted with a
/// propensity column re-augment new points internally through their
/// stored propensity model.
class CateModel {
 public:
  virtual ~CateModel() = default;

  virtual CateFamily family() const = 0;
  Index input_dim() const { return dim_; }
  virtual bool has_variance() const { return false; }

  Vector predict(const Matrix& X) const;
  Vector predict_variance(const Matrix& X) const;

 protected:
  explicit CateModel(Index dim) : dim_(dim) {}
  virtual Vector predict_impl(const Matrix& X) const = 0;
  virtual Vector variance_impl(const Matrix& X) const;

 private:
  Index dim_;
};

using CateModelPtr = std::shared_ptr<const CateModel>;

Vector predict_cate(const CateModel& model, const Matrix& X);
Vector predict_cate_variance(const CateModel& model, const Matrix& X);

inline constexpr const char* kPropensityColumn = "ps_hat";

/// Appends the estimate as a continuous covariate named "ps_hat".
CausalDataset augment_with_propensity(const CausalDataset& data,
                                      const Vector& pi_hat);

// ---------------------------------------------------------------------------
// S / T / X
// ---------------------------------------------------------------------------

/// Single outcome surface over [X, (ps), Z]; tau(x) = f(x,1) - f(x,0).
CateModelPtr fit_s_learner(const CausalDataset& data, const LearnerSpec& base,
                           const PropensityFit* ps = nullptr,
                           Rng* rng = nullptr);

/// Separate surfaces per arm; tau(x) = f1(x) - f0(x).
CateModelPtr fit_t_learner(const CausalDataset& data,
                           const LearnerSpec& base_control,
                           const LearnerSpec& base_treated,
                           const PropensityFit* ps = nullptr,
                           Rng* rng = nullptr);

enum class XWeightMode { kPropensity, kOne, kZero };

/// Imputed-effect learner: T-learner first stage, imputed effects
/// D1 = y - f0(x) on treated / D0 = f1(x) - y on controls, group-specific
/// regressions tau1/tau0, then tau(x) = g(x) tau0(x) + (1-g(x)) tau1(x)
/// with g the propensity (or the constant 1 or 0).
CateModelPtr fit_x_learner(const CausalDataset& data, const LearnerSpec& base,
                           const PropensityFit* ps, XWeightMode weight_mode,
                           Rng* rng = nullptr);

class XLearnerModel;
/// Access to the group-specific CATE surfaces of a fitted X-learner.
const XLearnerModel& as_x_learner(const CateModel& model);

// ---------------------------------------------------------------------------
// R-learner
// ---------------------------------------------------------------------------

/// Ingredients of the residual-on-residual loss.
struct RLearnerLossParts {
  Vector residual_outcome;    // y - m(x)
  Vector residual_treatment;  // z - pi(x)
  Vector weights;             // residual_treatment^2 (0 when |rt| < 1e-6)
  Vector pseudo_target;       // residual_outcome / residual_treatment
};

RLearnerLossParts r_learner_loss_parts(const Vector& y, const Vector& z,
                                       const Vector& m_hat,
                                       const Vector& pi_hat);

struct RLearnerOptions {
  int folds = 5;
  PropensityOptions propensity;
};

/// Stage 1 cross-fits the conditional-mean outcome m(x) and the
/// propensity; stage 2 fits base_tau to the pseudo-targets with weights
/// (z - pi)^2. A lasso base without "lambda" (or a boosting base without
/// "depth") is tuned by weighted cross validation on that same loss.
CateModelPtr fit_r_learner(const CausalDataset& data,
                           const LearnerSpec& base_tau,
                           const LearnerSpec& m_spec,
                           const RLearnerOptions& options,
                           const SeedTree& node);

/// Stage 2 alone, with the nuisance estimates supplied by the caller.
CateModelPtr fit_r_learner_with_nuisance(const CausalDataset& data,
                                         const LearnerSpec& base_tau,
                                         const Vector& m_hat,
                                         const Vector& pi_hat,
                                         Rng* rng = nullptr);

// ---------------------------------------------------------------------------
// Multitask GP
// ---------------------------------------------------------------------------

struct MultitaskGpOptions {
  double lengthscale = 1.0;
  double noise_variance = 0.1;
  bool optimize = true;
  int restarts = 3;
  /// Pins the 2x2 task-covariance matrix (row/col 0 = control,
  /// 1 = treated) instead of learning it.
  std::optional<Eigen::Matrix2d> fixed_coregionalization;
};

/// One GP over (x, z) with an intrinsic-coregionalization kernel
/// K((x,z),(x',z')) = B[z,z'] * k_rbf(x,x'), B PSD via its Cholesky
/// factor. tau(x) is the posterior-mean difference between the two task
/// surfaces; predict_variance gives Var[f(x,1) - f(x,0)].
CateModelPtr fit_multitask_gp(const CausalDataset& data,
                              const MultitaskGpOptions& options, Rng& rng,
                              const PropensityFit* ps = nullptr);

class MultitaskGpModel;
const MultitaskGpModel& as_multitask_gp(const CateModel& model);

// ---------------------------------------------------------------------------
// tau-learner (backfitting on y = mu(x) + tau(x) z + e)
// ---------------------------------------------------------------------------

struct TauLearnerOptions {
  int sweeps = 50;
  double tol = 1e-8;
};

/// Alternating fits: the mu-step regresses y - tau(x) z on [X, ps_hat]
/// over all units; the tau-step regresses y - mu(x) on X over treated
/// units only. Stops after `sweeps` or when max |delta tau| <= tol.
CateModelPtr fit_tau_learner(const CausalDataset& data,
                             const LearnerSpec& base_mu,
                             const LearnerSpec& base_tau,
                             const Vector& pi_hat,
                             const TauLearnerOptions& options,
                             Rng* rng = nullptr);

class TauLearnerModel;
const TauLearnerModel& as_tau_learner(const CateModel& model);

/// (mu spec, tau spec) with the tau side regularized more strongly:
/// ridge penalty x10 for linear bases, depth 2 vs 5 for tree-based ones.
std::pair<LearnerSpec, LearnerSpec> default_tau_learner_specs(
    const LearnerSpec& base);

// ---------------------------------------------------------------------------
// Causal forest
// ---------------------------------------------------------------------------

struct CausalForestOptions {
  int trees = 200;
  int max_depth = 8;
  Index min_leaf = 5;
  Index mtry = 0;  // 0 -> ceil(d / 3)
  bool bootstrap = true;
};

/// Trees partition on the covariates exactly as fit_forest; within each
/// leaf the estimate is mean(y | z=1) - mean(y | z=0), and leaves missing
/// an arm inherit their parent's estimate.
CateModelPtr fit_causal_forest(const CausalDataset& data,
                               const CausalForestOptions& options, Rng& rng,
                               const PropensityFit* ps = nullptr);

// ---------------------------------------------------------------------------
// Unified configuration (CLI / benchmark entry point)
// ---------------------------------------------------------------------------

struct MetaLearnerConfig {
  std::string name = "model";
  CateFamily family = CateFamily::kS;
  LearnerSpec base;
  std::optional<LearnerSpec> base_control;  // T-learner overrides
  std::optional<LearnerSpec> base_treated;
  std::optional<LearnerSpec> m_spec;    // R-learner stage-1 outcome model
  std::optional<LearnerSpec> tau_spec;  // tau-learner override
  bool use_ps = true;
  XWeightMode weight_mode = XWeightMode::kPropensity;
  int folds = 5;     // R-learner
  int sweeps = 50;   // tau-learner
  double tol = 1e-8;
  PropensityOptions propensity;  // R-learner internal cross-fitting
};

/// Dispatches on family; `ps` may be null only for configurations that do
/// not need a propensity estimate.
CateModelPtr fit_cate_model(const MetaLearnerConfig& config,
                            const CausalDataset& data,
                            const PropensityFit* ps, const SeedTree& node);

// ---------------------------------------------------------------------------
// Concrete models with inspectable components
// ---------------------------------------------------------------------------

class XLearnerModel final : public CateModel {
 public:
  XLearnerModel(Index dim, RegressionModelPtr outcome0,
                RegressionModelPtr outcome1, RegressionModelPtr tau0,
                RegressionModelPtr tau1, XWeightMode mode,
                PropensityModelPtr weight_model);

  CateFamily family() const override { return CateFamily::kX; }
  const RegressionModel& outcome0() const { return *outcome0_; }
  const RegressionModel& outcome1() const { return *outcome1_; }
  const RegressionModel& tau0() const { return *tau0_; }
  const RegressionModel& tau1() const { return *tau1_; }
  XWeightMode weight_mode() const { return mode_; }
  Vector weights(const Matrix& X) const;  // g(x)

 private:
  Vector predict_impl(const Matrix& X) const override;

  RegressionModelPtr outcome0_, outcome1_, tau0_, tau1_;
  XWeightMode mode_;
  PropensityModelPtr weight_model_;
};

class TauLearnerModel final : public CateModel {
 public:
  TauLearnerModel(Index dim, RegressionModelPtr mu_model,
                  RegressionModelPtr tau_model, PropensityModelPtr ps,
                  int sweeps_used, std::vector<double> objective_trace);

  CateFamily family() const override { return CateFamily::kTau; }
  const RegressionModel& mu_model() const { return *mu_model_; }
  const RegressionModel& tau_model() const { return *tau_model_; }
  int sweeps_used() const { return sweeps_used_; }
  /// Sum of squared residuals of y - mu(x) - tau(x) z after each sweep.
  const std::vector<double>& objective_trace() const { return trace_; }

 private:
  Vector predict_impl(const Matrix& X) const override;

  RegressionModelPtr mu_model_, tau_model_;
  PropensityModelPtr ps_;
  int sweeps_used_;
  std::vector<double> trace_;
};

class MultitaskGpModel final : public CateModel {
 public:
  struct State;
  MultitaskGpModel(Index dim, std::shared_ptr<const State> state,
                   PropensityModelPtr ps);
  ~MultitaskGpModel() override;

  CateFamily family() const override { return CateFamily::kMultitask; }
  bool has_variance() const override { return true; }

  Eigen::Matrix2d coregionalization() const;  // B, index 0 = control
  double lengthscale() const;
  double noise_variance() const;
  double log_marginal_likelihood() const;

 private:
  Vector predict_impl(const Matrix& X) const override;
  Vector variance_impl(const Matrix& X) const override;
  Matrix augment(const Matrix& X) const;

  std::shared_ptr<const State> state_;
  PropensityModelPtr ps_;
};

}  // namespace hte
