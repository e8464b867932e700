#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace hcr {

enum class ColumnKind { continuous, discrete, mixed };

std::string column_kind_name(ColumnKind k);

// Canonical level key for a cell: missing cells key to "", numeric levels to
// a canonical decimal rendering, text levels to the raw cell.
std::string canonical_number(double v);

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  // Per-column missing sentinel, recognized besides empty cells and "NaN".
  std::optional<std::string> missing_marker;
  // discrete: all observed level keys, sorted (numerically when every level
  // parses as a number, else lexicographically). mixed: exactly one entry,
  // the designated special value ("" when the special value is missingness).
  std::vector<std::string> discrete_levels;
  // True when level keys are canonical numbers and cells match numerically.
  bool numeric_levels = false;
};

struct ColumnOverride {
  std::string name;
  std::optional<ColumnKind> kind;
  std::optional<std::string> missing_marker;
};

// Raw tabular data plus per-column kind classification. Cells are stored as
// the CSV text; numeric parses and missing flags are cached at build time.
// Immutable in practice: every mutating operation returns a new Dataset.
class Dataset {
public:
  Dataset() = default;

  // Builds a dataset from a header and row-major cells, running kind
  // inference (see classify note in dataset.cpp).
  static Dataset from_rows(std::vector<std::string> header,
                           std::vector<std::vector<std::string>> rows,
                           const std::vector<ColumnOverride>& overrides = {});

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return columns_.size(); }
  const std::vector<ColumnSpec>& columns() const { return columns_; }
  const ColumnSpec& column(std::size_t c) const { return columns_[c]; }
  int column_index(const std::string& name) const;  // -1 when absent

  int target_index() const { return target_index_; }
  void set_target(const std::string& name);
  void set_target_index(std::size_t c);

  const std::string& cell(std::size_t c, std::size_t r) const { return cells_[c][r]; }
  bool missing(std::size_t c, std::size_t r) const { return missing_[c][r] != 0; }
  // NaN for missing or non-numeric cells.
  double numeric(std::size_t c, std::size_t r) const { return numeric_[c][r]; }

  // Non-missing numeric values of a column, in row order.
  std::vector<double> numeric_values(std::size_t c) const;

  Dataset subset_rows(const std::vector<std::size_t>& rows) const;
  Dataset without_column(std::size_t c) const;
  Dataset keep_columns(const std::vector<std::size_t>& cols) const;

private:
  friend Dataset merge_datasets(const Dataset&, const Dataset&,
                                const std::string&, const std::string&,
                                const std::string&);

  std::vector<ColumnSpec> columns_;
  std::vector<std::vector<std::string>> cells_;  // column-major
  std::vector<std::vector<char>> missing_;
  std::vector<std::vector<double>> numeric_;
  std::size_t n_rows_ = 0;
  int target_index_ = -1;
};

// Full-string numeric parse after trimming; rejects inf/nan spellings.
std::optional<double> parse_number(const std::string& s);

// Loads an RFC 4180 CSV (UTF-8, header row required) and infers column
// kinds: discrete when <= 20 distinct values or any non-numeric entry,
// mixed when numeric with a repeated marker value or missing cells covering
// >= 1% of rows, else continuous.
Dataset load_csv(const std::string& path,
                 const std::vector<ColumnOverride>& overrides = {});

// Concatenates rows of two same-schema datasets and appends one discrete
// column holding the per-row source tag. Column kinds are re-inferred on the
// combined rows.
Dataset merge_datasets(const Dataset& a, const Dataset& b,
                       const std::string& tag_column, const std::string& tag_a,
                       const std::string& tag_b);

// Drops rows whose target cell is missing; order preserved.
Dataset select_rows_with_target(const Dataset& d);

}  // namespace hcr
