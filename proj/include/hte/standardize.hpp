#pragma once

#include <vector>

#include "hte/dataset.hpp"
#include "hte/types.hpp"

namespace hte {

/// Per-column affine transform; identity (mean 0, sd 1) for binary columns.
struct ColumnMoments {
  double mean = 0.0;
  double sd = 1.0;
  bool scaled = false;
};

/// Maps continuous columns to sample mean 0 / sample sd 1 (sd with the n-1
/// divisor) and leaves binary columns untouched. The stored moments invert
/// the transform exactly.
class Standardizer {
 public:
  static Standardizer fit(const CausalDataset& data);

  Matrix transform(const Matrix& covariates) const;
  Matrix inverse(const Matrix& covariates) const;
  Vector transform_row(const Vector& row) const;

  const std::vector<ColumnMoments>& columns() const { return columns_; }

 private:
  std::vector<ColumnMoments> columns_;
};

struct StandardizedDataset {
  CausalDataset data;
  Standardizer transform;
};

/// Throws DegenerateColumnError (naming the column) when a continuous
/// column has zero variance.
StandardizedDataset standardize_covariates(const CausalDataset& data);

}  // namespace hte
