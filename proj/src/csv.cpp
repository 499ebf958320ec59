#include "hte/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "hte/errors.hpp"

namespace hte {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

double parse_field(const std::string& field, const std::string& origin,
                   std::size_t line_no) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto result = std::from_chars(first, last, value);
  if (result.ec != std::errc{} || result.ptr != last) {
    throw SchemaError(origin + ":" + std::to_string(line_no) +
                      ": cannot parse numeric field '" + field + "'");
  }
  return value;
}

}  // namespace

Index CsvTable::column_index(std::string_view name) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return static_cast<Index>(j);
  }
  throw SchemaError("csv: no column named '" + std::string(name) + "'");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("csv: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), path);
}

CsvTable parse_csv(const std::string& text, const std::string& origin) {
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto fields = split_fields(stripped);
    if (!have_header) {
      table.header = fields;
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw SchemaError(origin + ":" + std::to_string(line_no) +
                        ": expected " + std::to_string(table.header.size()) +
                        " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      row[j] = parse_field(fields[j], origin, line_no);
    }
    rows.push_back(std::move(row));
  }
  if (!have_header) throw SchemaError(origin + ": missing header row");
  table.values.resize(static_cast<Index>(rows.size()),
                      static_cast<Index>(table.header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      table.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return table;
}

CausalDataset dataset_from_csv(const CsvTable& table,
                               const std::string& treatment_column,
                               const std::string& outcome_column) {
  const Index z_col = table.column_index(treatment_column);
  Index y_col = -1;
  if (!outcome_column.empty()) y_col = table.column_index(outcome_column);

  CausalDataset data;
  data.treatment = table.values.col(z_col);
  data.outcome = y_col >= 0 ? Vector(table.values.col(y_col))
                            : Vector(Vector::Zero(table.rows()));

  std::vector<Index> keep;
  for (Index j = 0; j < table.cols(); ++j) {
    if (j == z_col || j == y_col) continue;
    keep.push_back(j);
  }
  data.covariates.resize(table.rows(), static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const Index j = keep[k];
    data.covariates.col(static_cast<Index>(k)) = table.values.col(j);
    const auto col = table.values.col(j);
    bool binary = true;
    for (Index i = 0; i < col.size() && binary; ++i) {
      binary = (col[i] == 0.0 || col[i] == 1.0);
    }
    data.column_kinds.push_back(binary ? ColumnKind::kBinary
                                       : ColumnKind::kContinuous);
    data.column_names.push_back(table.header[static_cast<std::size_t>(j)]);
  }
  data.validate();
  return data;
}

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

void write_csv(const std::string& path,
               const std::vector<std::string>& comments,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("csv: cannot write '" + path + "'");
  for (const auto& comment : comments) out << "# " << comment << "\n";
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out << ',';
    out << header[j];
  }
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << row[j];
    }
    out << "\n";
  }
}

}  // namespace hte
