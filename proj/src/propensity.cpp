#include "hte/propensity.hpp"

#include <algorithm>
#include <cmath>

#include "hte/errors.hpp"

namespace hte {
namespace {

Vector clip_vector(Vector values, double lo, double hi) {
  for (Index i = 0; i < values.size(); ++i) {
    values[i] = std::clamp(values[i], lo, hi);
  }
  return values;
}

bool complements_have_both_classes(const Vector& z,
                                   const std::vector<int>& assignment,
                                   int folds) {
  for (int f = 0; f < folds; ++f) {
    bool saw_zero = false, saw_one = false;
    for (Index i = 0; i < z.size(); ++i) {
      if (assignment[static_cast<std::size_t>(i)] == f) continue;
      (z[i] == 1.0 ? saw_one : saw_zero) = true;
      if (saw_zero && saw_one) break;
    }
    if (!saw_zero || !saw_one) return false;
  }
  return true;
}

std::vector<int> plain_folds(Index n, int folds, Rng& rng) {
  IndexVector order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  rng.shuffle(order);
  std::vector<int> assignment(static_cast<std::size_t>(n), 0);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    assignment[static_cast<std::size_t>(order[pos])] =
        static_cast<int>(pos % static_cast<std::size_t>(folds));
  }
  return assignment;
}

}  // namespace

PropensityModel::PropensityModel(ClassifierModelPtr classifier,
                                 double clip_low, double clip_high,
                                 bool cross_fitted,
                                 std::vector<int> fold_assignments)
    : classifier_(std::move(classifier)),
      clip_low_(clip_low),
      clip_high_(clip_high),
      cross_fitted_(cross_fitted),
      folds_(std::move(fold_assignments)) {}

Vector PropensityModel::predict(const Matrix& X) const {
  return clip_vector(classifier_->prob(X), clip_low_, clip_high_);
}

double PropensityModel::predict_one(const Vector& x) const {
  return std::clamp(classifier_->prob_one(x), clip_low_, clip_high_);
}

std::vector<int> stratified_folds(const Vector& z, int folds, Rng& rng) {
  IndexVector treated, control;
  for (Index i = 0; i < z.size(); ++i) {
    (z[i] == 1.0 ? treated : control).push_back(i);
  }
  rng.shuffle(treated);
  rng.shuffle(control);
  std::vector<int> assignment(static_cast<std::size_t>(z.size()), 0);
  int next = 0;
  for (const Index i : treated) {
    assignment[static_cast<std::size_t>(i)] = next;
    next = (next + 1) % folds;
  }
  next = 0;
  for (const Index i : control) {
    assignment[static_cast<std::size_t>(i)] = next;
    next = (next + 1) % folds;
  }
  return assignment;
}

PropensityFit estimate_propensity(const CausalDataset& data,
                                  const PropensityOptions& options, Rng& rng) {
  data.validate();
  const Index n = data.n();
  if (!(options.clip_low > 0.0 && options.clip_low < options.clip_high &&
        options.clip_high < 1.0)) {
    throw InvalidArgumentError("estimate_propensity: need 0 < low < high < 1");
  }
  if (options.folds != 1 && (options.folds < 2 || options.folds > n)) {
    throw InvalidArgumentError("estimate_propensity: folds must be 1 or in [2, N]");
  }

  const ClassifierModelPtr full =
      fit_classifier(data.covariates, data.treatment, options.l2);

  PropensityFit out;
  if (options.folds == 1) {
    out.model = std::make_shared<PropensityModel>(
        full, options.clip_low, options.clip_high, false, std::vector<int>{});
    out.pi_hat = clip_vector(full->prob(data.covariates), options.clip_low,
                             options.clip_high);
    return out;
  }

  std::vector<int> assignment = plain_folds(n, options.folds, rng);
  if (!complements_have_both_classes(data.treatment, assignment, options.folds)) {
    assignment = stratified_folds(data.treatment, options.folds, rng);
    if (!complements_have_both_classes(data.treatment, assignment,
                                       options.folds)) {
      throw StratificationError(
          "estimate_propensity: cannot stratify folds so every training "
          "complement keeps both arms");
    }
  }

  Vector pi(n);
  for (int f = 0; f < options.folds; ++f) {
    IndexVector train, held;
    for (Index i = 0; i < n; ++i) {
      (assignment[static_cast<std::size_t>(i)] == f ? held : train).push_back(i);
    }
    if (held.empty()) continue;
    const auto fold_model =
        fit_classifier(slice_rows(data.covariates, train),
                       slice(data.treatment, train), options.l2);
    const Vector fold_pi = fold_model->prob(slice_rows(data.covariates, held));
    for (std::size_t k = 0; k < held.size(); ++k) {
      pi[held[k]] = fold_pi[static_cast<Index>(k)];
    }
  }

  out.model = std::make_shared<PropensityModel>(
      full, options.clip_low, options.clip_high, true, std::move(assignment));
  out.pi_hat = clip_vector(std::move(pi), options.clip_low, options.clip_high);
  return out;
}

OverlapReport overlap_diagnostics(const Vector& pi_hat, const Vector& z,
                                  int bins) {
  if (pi_hat.size() != z.size()) {
    throw DimensionError("overlap_diagnostics: length mismatch");
  }
  if (bins < 1) throw InvalidArgumentError("overlap_diagnostics: bins must be >= 1");
  OverlapReport report;
  report.bin_edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) {
    report.bin_edges[b] = static_cast<double>(b) / bins;
  }
  report.treated_counts.assign(static_cast<std::size_t>(bins), 0);
  report.control_counts.assign(static_cast<std::size_t>(bins), 0);

  Index n_treated = 0, n_control = 0;
  for (Index i = 0; i < pi_hat.size(); ++i) {
    const double p = pi_hat[i];
    const int b = std::min(bins - 1, static_cast<int>(std::floor(p * bins)));
    if (z[i] == 1.0) {
      ++report.treated_counts[static_cast<std::size_t>(b)];
      ++n_treated;
    } else {
      ++report.control_counts[static_cast<std::size_t>(b)];
      ++n_control;
    }
    if (p < 0.05 || p > 0.95) {
      ++report.outside_range;
      report.flagged.push_back(i);
    }
  }

  double coefficient = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double share_t =
        n_treated > 0 ? static_cast<double>(report.treated_counts[static_cast<std::size_t>(b)]) /
                            static_cast<double>(n_treated)
                      : 0.0;
    const double share_c =
        n_control > 0 ? static_cast<double>(report.control_counts[static_cast<std::size_t>(b)]) /
                            static_cast<double>(n_control)
                      : 0.0;
    coefficient += std::min(share_t, share_c);
  }
  report.overlap_coefficient = coefficient;
  return report;
}

}  // namespace hte
