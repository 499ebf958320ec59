#pragma once

#include <memory>

#include "hte/dataset.hpp"
#include "hte/learners.hpp"
#include "hte/rng.hpp"

namespace hte {

struct PropensityOptions {
  int folds = 5;  // 1 disables cross-fitting; N gives leave-one-out
  double l2 = 1e-3;
  double clip_low = 0.01;
  double clip_high = 0.99;
};

/// A fitted treatment-assignment model. Emitted probabilities are always
/// clipped into [clip_low, clip_high].
class PropensityModel {
 public:
  PropensityModel(ClassifierModelPtr classifier, double clip_low,
                  double clip_high, bool cross_fitted,
                  std::vector<int> fold_assignments);

  Vector predict(const Matrix& X) const;
  double predict_one(const Vector& x) const;

  double clip_low() const { return clip_low_; }
  double clip_high() const { return clip_high_; }
  bool cross_fitted() const { return cross_fitted_; }
  /// Per-unit fold id used for cross-fitting (empty when folds == 1).
  const std::vector<int>& fold_assignments() const { return folds_; }
  const ClassifierModel& classifier() const { return *classifier_; }

 private:
  ClassifierModelPtr classifier_;  // full-data fit, used for new points
  double clip_low_, clip_high_;
  bool cross_fitted_;
  std::vector<int> folds_;
};

using PropensityModelPtr = std::shared_ptr<const PropensityModel>;

struct PropensityFit {
  PropensityModelPtr model;
  /// Per-training-unit estimate; out-of-fold when cross-fitting.
  Vector pi_hat;
};

/// With folds > 1, each unit's estimate comes from a classifier fitted on
/// the other folds. Random folds are retried with stratification by
/// treatment when a training complement collapses to one class; when even
/// stratification cannot fix that, StratificationError is thrown.
PropensityFit estimate_propensity(const CausalDataset& data,
                                  const PropensityOptions& options, Rng& rng);

/// Per-arm round-robin deal over shuffled indices; fold sizes within an
/// arm differ by at most one.
std::vector<int> stratified_folds(const Vector& z, int folds, Rng& rng);

struct OverlapReport {
  Vector bin_edges;  // bins + 1 entries spanning [0, 1]
  std::vector<int> treated_counts;
  std::vector<int> control_counts;
  Index outside_range = 0;  // units with pi outside [0.05, 0.95]
  IndexVector flagged;
  double overlap_coefficient = 0.0;
};

/// Histogram summary of the propensity distribution per arm plus the
/// normalized histogram-intersection coefficient.
OverlapReport overlap_diagnostics(const Vector& pi_hat, const Vector& z,
                                  int bins = 10);

}  // namespace hte
