#include "core/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include "core/errors.hpp"

namespace hcr {

std::string column_kind_name(ColumnKind k) {
  switch (k) {
    case ColumnKind::continuous: return "continuous";
    case ColumnKind::discrete: return "discrete";
    case ColumnKind::mixed: return "mixed";
  }
  return "?";
}

std::string canonical_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::optional<double> parse_number(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  if (b == e) return std::nullopt;
  const std::string t = s.substr(b, e - b);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

namespace {

bool is_nan_token(const std::string& s) {
  if (s.size() != 3) return false;
  return (s[0] == 'n' || s[0] == 'N') && (s[1] == 'a' || s[1] == 'A') &&
         (s[2] == 'n' || s[2] == 'N');
}

bool cell_missing(const std::string& cell, const std::optional<std::string>& marker) {
  if (cell.empty() || is_nan_token(cell)) return true;
  return marker && cell == *marker;
}

struct ColumnScan {
  std::vector<char> missing;
  std::vector<double> numeric;  // NaN where missing/non-numeric
  bool numeric_ok = true;       // every non-missing cell parses
  std::size_t missing_count = 0;
};

ColumnScan scan_column(const std::vector<std::string>& cells,
                       const std::optional<std::string>& marker) {
  ColumnScan s;
  s.missing.resize(cells.size(), 0);
  s.numeric.resize(cells.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t r = 0; r < cells.size(); ++r) {
    if (cell_missing(cells[r], marker)) {
      s.missing[r] = 1;
      ++s.missing_count;
      continue;
    }
    if (auto v = parse_number(cells[r])) {
      s.numeric[r] = *v;
    } else {
      s.numeric_ok = false;
    }
  }
  return s;
}

// Distinct level keys of a column, sorted. Numeric columns sort and key by
// value; text columns keep raw cells; missing cells key to "".
std::vector<std::string> level_keys(const std::vector<std::string>& cells,
                                    const ColumnScan& scan, bool* numeric_levels) {
  bool all_numeric = scan.numeric_ok;
  if (all_numeric) {
    std::set<double> distinct;
    bool has_missing = false;
    for (std::size_t r = 0; r < cells.size(); ++r) {
      if (scan.missing[r]) {
        has_missing = true;
      } else {
        distinct.insert(scan.numeric[r]);
      }
    }
    std::vector<std::string> keys;
    if (has_missing) keys.push_back("");
    for (double v : distinct) keys.push_back(canonical_number(v));
    *numeric_levels = true;
    return keys;
  }
  std::set<std::string> distinct;
  bool has_missing = false;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    if (scan.missing[r]) {
      has_missing = true;
    } else {
      distinct.insert(cells[r]);
    }
  }
  std::vector<std::string> keys;
  if (has_missing) keys.push_back("");
  keys.insert(keys.end(), distinct.begin(), distinct.end());
  *numeric_levels = false;
  return keys;
}

}  // namespace

Dataset Dataset::from_rows(std::vector<std::string> header,
                           std::vector<std::vector<std::string>> rows,
                           const std::vector<ColumnOverride>& overrides) {
  if (header.empty()) {
    fail(ErrorCode::parse, "empty table: no columns");
  }
  {
    std::set<std::string> names(header.begin(), header.end());
    if (names.size() != header.size()) {
      fail(ErrorCode::parse, "duplicate column names in header");
    }
  }
  if (rows.size() < 2) {
    fail(ErrorCode::parse, "empty table: need at least 2 data rows, got " +
                               std::to_string(rows.size()));
  }
  const std::size_t k = header.size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != k) {
      fail(ErrorCode::parse, "ragged row " + std::to_string(r + 2) + ": expected " +
                                 std::to_string(k) + " cells, got " +
                                 std::to_string(rows[r].size()));
    }
  }

  std::unordered_map<std::string, const ColumnOverride*> by_name;
  for (const auto& o : overrides) by_name[o.name] = &o;

  Dataset d;
  d.n_rows_ = rows.size();
  d.columns_.resize(k);
  d.cells_.resize(k);
  d.missing_.resize(k);
  d.numeric_.resize(k);

  for (std::size_t c = 0; c < k; ++c) {
    ColumnSpec& spec = d.columns_[c];
    spec.name = header[c];
    const ColumnOverride* ov = nullptr;
    if (auto it = by_name.find(spec.name); it != by_name.end()) ov = it->second;
    if (ov && ov->missing_marker) spec.missing_marker = ov->missing_marker;

    auto& cells = d.cells_[c];
    cells.resize(d.n_rows_);
    for (std::size_t r = 0; r < d.n_rows_; ++r) cells[r] = rows[r][c];

    ColumnScan scan = scan_column(cells, spec.missing_marker);

    // Kind inference. Discrete: <= 20 distinct values or any non-numeric
    // entry. Mixed: numeric with missing cells or one repeated value covering
    // >= 1% of rows (the 1% floor keeps a stray sentinel from flagging a
    // column mixed). Else continuous.
    if (ov && ov->kind) {
      spec.kind = *ov->kind;
    } else if (!scan.numeric_ok) {
      spec.kind = ColumnKind::discrete;
    } else {
      std::map<double, std::size_t> counts;
      for (std::size_t r = 0; r < d.n_rows_; ++r) {
        if (!scan.missing[r]) ++counts[scan.numeric[r]];
      }
      const double threshold = 0.01 * static_cast<double>(d.n_rows_);
      std::size_t mode_count = 0;
      for (const auto& [v, cnt] : counts) mode_count = std::max(mode_count, cnt);
      if (counts.size() <= 20) {
        spec.kind = ColumnKind::discrete;
      } else if (static_cast<double>(scan.missing_count) >= threshold) {
        spec.kind = ColumnKind::mixed;
        spec.discrete_levels = {""};  // special value is missingness
        spec.numeric_levels = true;
      } else if (mode_count >= 2 && static_cast<double>(mode_count) >= threshold) {
        double mode_value = 0;
        for (const auto& [v, cnt] : counts) {
          if (cnt == mode_count) { mode_value = v; break; }
        }
        spec.kind = ColumnKind::mixed;
        spec.discrete_levels = {canonical_number(mode_value)};
        spec.numeric_levels = true;
      } else {
        spec.kind = ColumnKind::continuous;
      }
    }

    if (spec.kind == ColumnKind::discrete) {
      bool numeric_levels = false;
      spec.discrete_levels = level_keys(cells, scan, &numeric_levels);
      spec.numeric_levels = numeric_levels;
    } else if (spec.kind == ColumnKind::mixed && spec.discrete_levels.empty()) {
      // Kind forced by override without an inferred special value: prefer
      // missing cells, else the most frequent value.
      if (scan.missing_count > 0) {
        spec.discrete_levels = {""};
      } else {
        std::map<double, std::size_t> counts;
        for (std::size_t r = 0; r < d.n_rows_; ++r) {
          if (!scan.missing[r] && !std::isnan(scan.numeric[r])) ++counts[scan.numeric[r]];
        }
        double mode_value = 0;
        std::size_t best = 0;
        for (const auto& [v, cnt] : counts) {
          if (cnt > best) { best = cnt; mode_value = v; }
        }
        spec.discrete_levels = {canonical_number(mode_value)};
      }
      spec.numeric_levels = true;
    }

    d.missing_[c] = std::move(scan.missing);
    d.numeric_[c] = std::move(scan.numeric);
  }
  return d;
}

int Dataset::column_index(const std::string& name) const {
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c].name == name) return static_cast<int>(c);
  }
  return -1;
}

void Dataset::set_target(const std::string& name) {
  const int c = column_index(name);
  if (c < 0) {
    fail(ErrorCode::schema_mismatch, "no such column: \"" + name + "\"");
  }
  target_index_ = c;
}

void Dataset::set_target_index(std::size_t c) {
  if (c >= columns_.size()) {
    fail(ErrorCode::invalid_argument, "target index out of range");
  }
  target_index_ = static_cast<int>(c);
}

std::vector<double> Dataset::numeric_values(std::size_t c) const {
  std::vector<double> out;
  out.reserve(n_rows_);
  for (std::size_t r = 0; r < n_rows_; ++r) {
    if (!missing_[c][r] && !std::isnan(numeric_[c][r])) out.push_back(numeric_[c][r]);
  }
  return out;
}

Dataset Dataset::subset_rows(const std::vector<std::size_t>& rows) const {
  Dataset d;
  d.columns_ = columns_;  // schema (kinds, levels) is kept, not re-inferred
  d.target_index_ = target_index_;
  d.n_rows_ = rows.size();
  const std::size_t k = columns_.size();
  d.cells_.resize(k);
  d.missing_.resize(k);
  d.numeric_.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    d.cells_[c].reserve(rows.size());
    d.missing_[c].reserve(rows.size());
    d.numeric_[c].reserve(rows.size());
    for (std::size_t r : rows) {
      if (r >= n_rows_) fail(ErrorCode::invalid_argument, "row index out of range");
      d.cells_[c].push_back(cells_[c][r]);
      d.missing_[c].push_back(missing_[c][r]);
      d.numeric_[c].push_back(numeric_[c][r]);
    }
  }
  return d;
}

Dataset Dataset::without_column(std::size_t drop) const {
  if (drop >= columns_.size()) {
    fail(ErrorCode::invalid_argument, "column index out of range");
  }
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (c != drop) keep.push_back(c);
  }
  return keep_columns(keep);
}

Dataset Dataset::keep_columns(const std::vector<std::size_t>& cols) const {
  Dataset d;
  d.n_rows_ = n_rows_;
  for (std::size_t c : cols) {
    if (c >= columns_.size()) {
      fail(ErrorCode::invalid_argument, "column index out of range");
    }
    if (target_index_ >= 0 && c == static_cast<std::size_t>(target_index_)) {
      d.target_index_ = static_cast<int>(d.columns_.size());
    }
    d.columns_.push_back(columns_[c]);
    d.cells_.push_back(cells_[c]);
    d.missing_.push_back(missing_[c]);
    d.numeric_.push_back(numeric_[c]);
  }
  if (d.columns_.empty()) {
    fail(ErrorCode::invalid_argument, "cannot keep zero columns");
  }
  return d;
}

namespace {

// RFC 4180 state machine; tolerates CRLF and a missing final newline.
std::vector<std::vector<std::string>> parse_csv_stream(std::istream& in,
                                                       const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };

  char ch;
  while (in.get(ch)) {
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field_started && field.empty()) {
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(ch);  // stray quote inside unquoted field
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        break;
      default:
        field.push_back(ch);
        field_started = true;
        break;
    }
  }
  if (in_quotes) {
    fail(ErrorCode::parse, path + ": unterminated quoted field");
  }
  if (field_started || !field.empty() || !row.empty()) {
    end_row();
  }
  return rows;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::vector<ColumnOverride>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorCode::io, "cannot open \"" + path + "\"");
  }
  auto rows = parse_csv_stream(in, path);
  if (rows.empty()) {
    fail(ErrorCode::parse, path + ": empty table");
  }
  std::vector<std::string> header = std::move(rows.front());
  rows.erase(rows.begin());
  return Dataset::from_rows(std::move(header), std::move(rows), overrides);
}

Dataset merge_datasets(const Dataset& a, const Dataset& b,
                       const std::string& tag_column, const std::string& tag_a,
                       const std::string& tag_b) {
  if (a.n_cols() != b.n_cols()) {
    fail(ErrorCode::schema_mismatch, "merge: column counts differ");
  }
  for (std::size_t c = 0; c < a.n_cols(); ++c) {
    if (a.column(c).name != b.column(c).name) {
      fail(ErrorCode::schema_mismatch, "merge: column " + std::to_string(c) +
                                           " named \"" + a.column(c).name +
                                           "\" vs \"" + b.column(c).name + "\"");
    }
  }
  if (a.column_index(tag_column) >= 0) {
    fail(ErrorCode::schema_mismatch, "merge: tag column \"" + tag_column +
                                         "\" already exists");
  }

  std::vector<std::string> header;
  for (const auto& spec : a.columns()) header.push_back(spec.name);
  header.push_back(tag_column);

  std::vector<std::vector<std::string>> rows;
  rows.reserve(a.n_rows() + b.n_rows());
  for (std::size_t r = 0; r < a.n_rows(); ++r) {
    std::vector<std::string> row;
    row.reserve(header.size());
    for (std::size_t c = 0; c < a.n_cols(); ++c) row.push_back(a.cell(c, r));
    row.push_back(tag_a);
    rows.push_back(std::move(row));
  }
  for (std::size_t r = 0; r < b.n_rows(); ++r) {
    std::vector<std::string> row;
    row.reserve(header.size());
    for (std::size_t c = 0; c < b.n_cols(); ++c) row.push_back(b.cell(c, r));
    row.push_back(tag_b);
    rows.push_back(std::move(row));
  }

  // Kinds are re-inferred on the combined rows so the halves cannot disagree;
  // the tag column is forced discrete.
  std::vector<ColumnOverride> overrides;
  for (const auto& spec : a.columns()) {
    if (spec.missing_marker) {
      overrides.push_back({spec.name, std::nullopt, spec.missing_marker});
    }
  }
  overrides.push_back({tag_column, ColumnKind::discrete, std::nullopt});

  Dataset merged = Dataset::from_rows(std::move(header), std::move(rows), overrides);
  if (a.target_index() >= 0) {
    merged.set_target_index(static_cast<std::size_t>(a.target_index()));
  }
  return merged;
}

Dataset select_rows_with_target(const Dataset& d) {
  if (d.target_index() < 0) {
    fail(ErrorCode::invalid_argument, "no target column set");
  }
  const std::size_t t = static_cast<std::size_t>(d.target_index());
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    if (!d.missing(t, r)) keep.push_back(r);
  }
  if (keep.empty()) {
    fail(ErrorCode::invalid_argument, "no rows with target \"" +
                                          d.column(t).name + "\" present");
  }
  if (keep.size() == d.n_rows()) return d;
  return d.subset_rows(keep);
}

}  // namespace hcr
