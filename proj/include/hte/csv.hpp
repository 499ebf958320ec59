#pragma once

#include <string>
#include <vector>

#include "hte/dataset.hpp"
#include "hte/types.hpp"

namespace hte {

/// Numeric table parsed from a comma-delimited file: one header row, '.'
/// decimal separator. Lines starting with '#' are skipped.
struct CsvTable {
  std::vector<std::string> header;
  Matrix values;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
  Index column_index(std::string_view name) const;  // throws SchemaError
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text, const std::string& origin);

/// Builds a dataset from a table: one treatment column (0/1 values), one
/// optional outcome column (empty name -> all-zero outcome), every other
/// column becomes a covariate tagged binary when its values are all {0,1}.
CausalDataset dataset_from_csv(const CsvTable& table,
                               const std::string& treatment_column,
                               const std::string& outcome_column);

/// Shortest round-trip decimal rendering (to_chars).
std::string format_double(double value);

/// Writes comment lines (prefixed '#'), then the header, then the rows.
void write_csv(const std::string& path,
               const std::vector<std::string>& comments,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace hte
