#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hte/types.hpp"

namespace hte {

/// One study: covariates X (N x d), binary treatment Z, observed outcome Y.
/// Treatment entries are 0/1 with both arms non-empty; all values finite;
/// binary-tagged columns contain only {0, 1}.
struct CausalDataset {
  Matrix covariates;
  Vector treatment;
  Vector outcome;
  std::vector<ColumnKind> column_kinds;
  std::vector<std::string> column_names;

  Index n() const { return covariates.rows(); }
  Index dim() const { return covariates.cols(); }

  /// Throws if any invariant is violated.
  void validate() const;

  Index column_index(std::string_view name) const;  // throws SchemaError
  bool has_column(std::string_view name) const;

  CausalDataset select_rows(std::span<const Index> rows) const;

  IndexVector treated_indices() const;
  IndexVector control_indices() const;

  /// Appends a continuous column; throws SchemaError on a name collision.
  CausalDataset with_column(std::string name, const Vector& values) const;
  CausalDataset without_column(std::string_view name) const;
};

/// Ground truth for one simulated outcome draw. tau == mu1 - mu0 exactly,
/// and the paired dataset's outcome equals z*y1 + (1-z)*y0 exactly.
struct SimTruth {
  Vector mu0;
  Vector mu1;
  Vector tau;
  Vector y0;
  Vector y1;

  Index n() const { return tau.size(); }

  /// z*y1 + (1-z)*y0.
  Vector observed_outcome(const Vector& treatment) const;

  void validate() const;
  void validate_against(const Vector& treatment, const Vector& outcome) const;
};

Vector slice(const Vector& values, std::span<const Index> rows);
Matrix slice_rows(const Matrix& values, std::span<const Index> rows);

}  // namespace hte
