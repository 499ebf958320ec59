#include "hte/standardize.hpp"

#include <cmath>

#include "hte/errors.hpp"

namespace hte {

Standardizer Standardizer::fit(const CausalDataset& data) {
  Standardizer out;
  out.columns_.resize(static_cast<std::size_t>(data.dim()));
  const Index rows = data.n();
  for (Index j = 0; j < data.dim(); ++j) {
    auto& column = out.columns_[static_cast<std::size_t>(j)];
    if (data.column_kinds[static_cast<std::size_t>(j)] == ColumnKind::kBinary) {
      continue;
    }
    const double mean = data.covariates.col(j).mean();
    const double ss = (data.covariates.col(j).array() - mean).square().sum();
    const double sd = rows > 1 ? std::sqrt(ss / static_cast<double>(rows - 1)) : 0.0;
    if (!(sd > 0.0)) {
      throw DegenerateColumnError(
          "standardize: continuous column '" +
          data.column_names[static_cast<std::size_t>(j)] + "' has zero variance");
    }
    column.mean = mean;
    column.sd = sd;
    column.scaled = true;
  }
  return out;
}

Matrix Standardizer::transform(const Matrix& covariates) const {
  if (covariates.cols() != static_cast<Index>(columns_.size())) {
    throw DimensionError("standardize: column count mismatch");
  }
  Matrix out = covariates;
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    const auto& column = columns_[j];
    if (!column.scaled) continue;
    out.col(static_cast<Index>(j)) =
        (out.col(static_cast<Index>(j)).array() - column.mean) / column.sd;
  }
  return out;
}

Matrix Standardizer::inverse(const Matrix& covariates) const {
  if (covariates.cols() != static_cast<Index>(columns_.size())) {
    throw DimensionError("standardize: column count mismatch");
  }
  Matrix out = covariates;
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    const auto& column = columns_[j];
    if (!column.scaled) continue;
    out.col(static_cast<Index>(j)) =
        out.col(static_cast<Index>(j)).array() * column.sd + column.mean;
  }
  return out;
}

Vector Standardizer::transform_row(const Vector& row) const {
  Matrix m = row.transpose();
  return transform(m).row(0).transpose();
}

StandardizedDataset standardize_covariates(const CausalDataset& data) {
  StandardizedDataset out;
  out.transform = Standardizer::fit(data);
  out.data = data;
  out.data.covariates = out.transform.transform(data.covariates);
  return out;
}

}  // namespace hte
