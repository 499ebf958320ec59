#include "hte/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "hte/errors.hpp"

namespace hte {

void CausalDataset::validate() const {
  const Index rows = covariates.rows();
  const Index cols = covariates.cols();
  if (treatment.size() != rows || outcome.size() != rows) {
    throw DimensionError("dataset: treatment/outcome length must equal row count");
  }
  if (static_cast<Index>(column_kinds.size()) != cols ||
      static_cast<Index>(column_names.size()) != cols) {
    throw DimensionError("dataset: column metadata length must equal column count");
  }
  if (!covariates.allFinite() || !outcome.allFinite()) {
    throw InvalidArgumentError("dataset: non-finite covariate or outcome value");
  }
  Index treated = 0;
  for (Index i = 0; i < rows; ++i) {
    const double z = treatment[i];
    if (z != 0.0 && z != 1.0) {
      throw InvalidArgumentError("dataset: treatment entries must be 0 or 1");
    }
    treated += (z == 1.0);
  }
  if (treated == 0 || treated == rows) {
    throw InvalidArgumentError("dataset: need at least one treated and one control unit");
  }
  for (Index j = 0; j < cols; ++j) {
    if (column_kinds[static_cast<std::size_t>(j)] != ColumnKind::kBinary) continue;
    for (Index i = 0; i < rows; ++i) {
      const double v = covariates(i, j);
      if (v != 0.0 && v != 1.0) {
        throw InvalidArgumentError("dataset: binary column '" +
                                   column_names[static_cast<std::size_t>(j)] +
                                   "' contains a value outside {0,1}");
      }
    }
  }
}

Index CausalDataset::column_index(std::string_view name) const {
  for (std::size_t j = 0; j < column_names.size(); ++j) {
    if (column_names[j] == name) return static_cast<Index>(j);
  }
  throw SchemaError("dataset: no column named '" + std::string(name) + "'");
}

bool CausalDataset::has_column(std::string_view name) const {
  return std::any_of(column_names.begin(), column_names.end(),
                     [&](const std::string& c) { return c == name; });
}

CausalDataset CausalDataset::select_rows(std::span<const Index> rows) const {
  CausalDataset out;
  out.covariates = slice_rows(covariates, rows);
  out.treatment = slice(treatment, rows);
  out.outcome = slice(outcome, rows);
  out.column_kinds = column_kinds;
  out.column_names = column_names;
  return out;
}

IndexVector CausalDataset::treated_indices() const {
  IndexVector out;
  for (Index i = 0; i < n(); ++i) {
    if (treatment[i] == 1.0) out.push_back(i);
  }
  return out;
}

IndexVector CausalDataset::control_indices() const {
  IndexVector out;
  for (Index i = 0; i < n(); ++i) {
    if (treatment[i] == 0.0) out.push_back(i);
  }
  return out;
}

CausalDataset CausalDataset::with_column(std::string name,
                                         const Vector& values) const {
  if (values.size() != n()) {
    throw DimensionError("with_column: length mismatch");
  }
  if (has_column(name)) {
    throw SchemaError("with_column: column '" + name + "' already exists");
  }
  CausalDataset out = *this;
  out.covariates.conservativeResize(Eigen::NoChange, dim() + 1);
  out.covariates.col(dim()) = values;
  out.column_kinds.push_back(ColumnKind::kContinuous);
  out.column_names.push_back(std::move(name));
  return out;
}

CausalDataset CausalDataset::without_column(std::string_view name) const {
  const Index drop = column_index(name);
  CausalDataset out;
  out.treatment = treatment;
  out.outcome = outcome;
  out.covariates.resize(n(), dim() - 1);
  Index k = 0;
  for (Index j = 0; j < dim(); ++j) {
    if (j == drop) continue;
    out.covariates.col(k++) = covariates.col(j);
    out.column_kinds.push_back(column_kinds[static_cast<std::size_t>(j)]);
    out.column_names.push_back(column_names[static_cast<std::size_t>(j)]);
  }
  return out;
}

Vector SimTruth::observed_outcome(const Vector& treatment) const {
  if (treatment.size() != n()) throw DimensionError("observed_outcome: length mismatch");
  Vector out(n());
  for (Index i = 0; i < n(); ++i) {
    out[i] = treatment[i] == 1.0 ? y1[i] : y0[i];
  }
  return out;
}

void SimTruth::validate() const {
  const Index rows = tau.size();
  if (mu0.size() != rows || mu1.size() != rows || y0.size() != rows ||
      y1.size() != rows) {
    throw DimensionError("sim truth: field lengths differ");
  }
  if (!mu0.allFinite() || !mu1.allFinite() || !y0.allFinite() || !y1.allFinite()) {
    throw InvalidArgumentError("sim truth: non-finite value");
  }
  for (Index i = 0; i < rows; ++i) {
    if (tau[i] != mu1[i] - mu0[i]) {
      throw InvalidArgumentError("sim truth: tau must equal mu1 - mu0 exactly");
    }
  }
}

void SimTruth::validate_against(const Vector& treatment,
                                const Vector& outcome) const {
  validate();
  if (treatment.size() != n() || outcome.size() != n()) {
    throw DimensionError("sim truth: length mismatch against dataset");
  }
  for (Index i = 0; i < n(); ++i) {
    const double expected = treatment[i] == 1.0 ? y1[i] : y0[i];
    if (outcome[i] != expected) {
      throw InvalidArgumentError("sim truth: observed outcome is not the assigned potential outcome");
    }
  }
}

Vector slice(const Vector& values, std::span<const Index> rows) {
  Vector out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Index>(i)] = values[rows[i]];
  return out;
}

Matrix slice_rows(const Matrix& values, std::span<const Index> rows) {
  Matrix out(static_cast<Index>(rows.size()), values.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Index>(i)) = values.row(rows[i]);
  }
  return out;
}

}  // namespace hte
