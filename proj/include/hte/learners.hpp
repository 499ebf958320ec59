#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hte/rng.hpp"
#include "hte/types.hpp"

namespace hte {

enum class LearnerFamily { kLinear, kKnn, kTree, kForest, kBoosting, kGp };

std::string to_string(LearnerFamily family);
LearnerFamily learner_family_from_string(std::string_view name);

/// A base-learner family plus its hyperparameters. Numeric knobs live in
/// `params`; the linear penalty kind is the lone string-valued setting.
struct LearnerSpec {
  LearnerFamily family = LearnerFamily::kLinear;
  std::string penalty = "none";  // linear only: none | ridge | lasso
  std::map<std::string, double> params;

  double param(const std::string& key, double fallback) const;
  bool has_param(const std::string& key) const;
  LearnerSpec with_param(const std::string& key, double value) const;
};

/// Throws InvalidArgumentError when a hyperparameter is out of range for
/// its family (k >= 1, depth >= 1, penalty >= 0, rate in (0,1],
/// kernel variances > 0).
void validate(const LearnerSpec& spec);

/// A fitted conditional-mean estimator. predict() accepts only matrices
/// with the training column count and always returns finite values.
class RegressionModel {
 public:
  virtual ~RegressionModel() = default;

  Vector predict(const Matrix& X) const;
  double predict_one(const Vector& x) const;
  Index input_dim() const { return dim_; }

 protected:
  explicit RegressionModel(Index dim) : dim_(dim) {}
  virtual Vector predict_impl(const Matrix& X) const = 0;

 private:
  Index dim_;
};

using RegressionModelPtr = std::shared_ptr<const RegressionModel>;

// ---------------------------------------------------------------------------
// Linear models
// ---------------------------------------------------------------------------

struct PenaltySpec {
  enum class Kind { kNone, kRidge, kLasso };
  Kind kind = Kind::kNone;
  double lambda = 0.0;

  static PenaltySpec none() { return {Kind::kNone, 0.0}; }
  static PenaltySpec ridge(double lambda) { return {Kind::kRidge, lambda}; }
  static PenaltySpec lasso(double lambda) { return {Kind::kLasso, lambda}; }
};

struct LinearCoefficients {
  double intercept = 0.0;
  Vector slopes;
};

/// none  -> least squares via column-pivoted QR (SingularDesignError when
///          the intercept-augmented design is rank deficient);
/// ridge -> penalized normal equations, intercept unpenalized;
/// lasso -> cyclic coordinate descent with soft thresholding to a
///          coefficient-change tolerance of 1e-8, intercept unpenalized.
/// Penalized objectives: (1/(2S)) sum w_i (y_i - b0 - x_i'b)^2 + lambda * P(b)
/// with S the total weight, P the l2/2 or l1 penalty on the slopes.
RegressionModelPtr fit_linear(const Matrix& X, const Vector& y,
                              const PenaltySpec& penalty,
                              const Vector* weights = nullptr);

/// Fitted coefficients of a linear model (throws on other families).
const LinearCoefficients& linear_coefficients(const RegressionModel& model);

/// Smallest lambda at which every lasso slope is zero.
double lasso_lambda_max(const Matrix& X, const Vector& y,
                        const Vector* weights = nullptr);

/// 50 log-spaced values from lambda_max down by a factor 1e-4.
std::vector<double> default_lasso_grid(const Matrix& X, const Vector& y,
                                       const Vector* weights = nullptr);

// ---------------------------------------------------------------------------
// k-nearest neighbours
// ---------------------------------------------------------------------------

/// Prediction is the mean outcome over the k nearest training rows in
/// Euclidean distance; distance ties break toward the lower row index.
RegressionModelPtr fit_knn(const Matrix& X, const Vector& y, Index k);

// ---------------------------------------------------------------------------
// CART, random forest, boosting
// ---------------------------------------------------------------------------

struct TreeOptions {
  int max_depth = 6;   // 0 fits a single leaf
  Index min_leaf = 1;
};

/// Greedy binary CART minimizing the summed within-child squared error;
/// leaves predict the (weighted) mean; split ties break toward the lower
/// column index, then the lower threshold.
RegressionModelPtr fit_tree(const Matrix& X, const Vector& y,
                            const TreeOptions& options,
                            const Vector* weights = nullptr);

struct ForestOptions {
  int trees = 200;
  int max_depth = 8;
  Index min_leaf = 1;
  Index mtry = 0;  // 0 -> ceil(d / 3)
  bool bootstrap = true;
};

/// Bootstrap-aggregated CART trees with mtry features sampled per split.
/// With bootstrap off, one tree, and mtry = d this reproduces fit_tree.
RegressionModelPtr fit_forest(const Matrix& X, const Vector& y,
                              const ForestOptions& options, Rng& rng);

struct BoostingOptions {
  int rounds = 200;
  double rate = 0.1;
  int max_depth = 3;
  Index min_leaf = 1;
};

/// Stagewise least-squares boosting: F0 is the weighted mean, each round
/// adds rate * (tree fitted to the current residuals).
RegressionModelPtr fit_boosting(const Matrix& X, const Vector& y,
                                const BoostingOptions& options,
                                const Vector* weights = nullptr);

// ---------------------------------------------------------------------------
// Gaussian-process regression
// ---------------------------------------------------------------------------

struct GpOptions {
  double lengthscale = 1.0;
  double signal_variance = 1.0;
  double noise_variance = 0.1;
  bool optimize = true;
  int restarts = 2;
  std::uint64_t restart_seed = 0x5eed0u;
};

class GpRegression;
using GpRegressionPtr = std::shared_ptr<const GpRegression>;

/// Exact GP posterior with an RBF kernel, via Cholesky of
/// K + noise*I + jitter*I (jitter starts at 1e-6 and escalates to 1e-2
/// before IllConditionedKernelError). With optimize set, hyperparameters
/// maximize the log marginal likelihood by gradient ascent from the given
/// start plus `restarts` random restarts. Guard: n <= 5000.
GpRegressionPtr fit_gp(const Matrix& X, const Vector& y,
                       const GpOptions& options);

class GpRegression : public RegressionModel {
 public:
  /// Latent function variance (reverts to the signal variance far from
  /// the training data).
  Vector predict_variance(const Matrix& X) const;

  double log_marginal_likelihood() const { return lml_; }
  double lengthscale() const { return lengthscale_; }
  double signal_variance() const { return signal_variance_; }
  double noise_variance() const { return noise_variance_; }

 private:
  friend GpRegressionPtr fit_gp(const Matrix&, const Vector&,
                                const GpOptions&);
  GpRegression(Matrix X, Vector alpha, Matrix chol_lower, double lengthscale,
               double signal_variance, double noise_variance, double lml);
  Vector predict_impl(const Matrix& X) const override;

  Matrix train_;
  Vector alpha_;
  Matrix chol_lower_;
  double lengthscale_, signal_variance_, noise_variance_, lml_;
};

/// Log marginal likelihood and its gradient with respect to
/// (log lengthscale, log signal variance, log noise variance).
std::pair<double, Eigen::Vector3d> gp_log_marginal(const Matrix& X,
                                                   const Vector& y,
                                                   double log_lengthscale,
                                                   double log_signal_variance,
                                                   double log_noise_variance);

// ---------------------------------------------------------------------------
// Logistic classifier
// ---------------------------------------------------------------------------

/// l2-regularized logistic regression fitted by damped Newton iterations;
/// emitted probabilities are strictly inside (0, 1).
class ClassifierModel {
 public:
  ClassifierModel(Vector beta, Index dim, double l2);

  Vector prob(const Matrix& X) const;
  double prob_one(const Vector& x) const;

  /// [intercept, slopes...].
  const Vector& coefficients() const { return beta_; }
  Index input_dim() const { return dim_; }

 private:
  Vector beta_;
  Index dim_;
  double l2_;
};

using ClassifierModelPtr = std::shared_ptr<const ClassifierModel>;

/// Newton iterations to gradient norm <= 1e-8 (at most 200, then
/// ConvergenceError). The effective l2 is floored at 1e-6; the intercept
/// is unpenalized. Requires both classes present.
ClassifierModelPtr fit_classifier(const Matrix& X, const Vector& z, double l2);

// ---------------------------------------------------------------------------
// Generic dispatch and cross validation
// ---------------------------------------------------------------------------

/// Fits `spec` on (X, y). Weights are honored by linear, tree, and
/// boosting fits and rejected elsewhere. `rng` feeds forest bootstraps and
/// hyperparameter selection; a fixed internal stream is used when omitted.
/// A lasso spec without "lambda" is tuned on the default grid by 5-fold
/// cross validation; a knn spec without "k" is tuned over {1,3,5,10,20}.
RegressionModelPtr fit_regression(const LearnerSpec& spec, const Matrix& X,
                                  const Vector& y,
                                  const Vector* weights = nullptr,
                                  Rng* rng = nullptr);

/// Fold membership used by cross_validate: indices are shuffled once and
/// dealt round-robin, so fold sizes differ by at most one.
std::vector<IndexVector> cv_fold_assignments(Index n, int folds, Rng& rng);

/// Returns the grid point minimizing the mean out-of-fold squared error;
/// ties go to the earlier grid entry. Requires folds >= 2 and a non-empty
/// grid. Fold layout comes from cv_fold_assignments on `rng`.
LearnerSpec cross_validate(const Matrix& X, const Vector& y, int folds,
                           const std::vector<LearnerSpec>& grid, Rng& rng);

/// Weighted variant: minimizes sum w*(y - f)^2 / sum w out of fold.
LearnerSpec cross_validate_weighted(const Matrix& X, const Vector& y,
                                    const Vector& weights, int folds,
                                    const std::vector<LearnerSpec>& grid,
                                    Rng& rng);

}  // namespace hte
