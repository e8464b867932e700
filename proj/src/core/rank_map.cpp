#include "core/rank_map.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace hcr {

double redshift_transform(double z) {
  if (!(z >= 0.0)) {
    fail(ErrorCode::invalid_argument, "redshift transform requires z >= 0");
  }
  return z / (1.0 + z);
}

double redshift_inverse(double y) {
  if (!(y >= 0.0) || y >= 1.0) {
    fail(ErrorCode::invalid_argument, "redshift inverse requires 0 <= y < 1");
  }
  return y / (1.0 - y);
}

namespace {

// Positions for the sorted sample: one entry per distinct group, the group
// covering 0-based indices [s, e] gets (s + e + 1)/(2n).
template <typename T>
void group_positions(const std::vector<T>& sorted, std::vector<T>* distinct,
                     std::vector<double>* positions) {
  const std::size_t n = sorted.size();
  std::size_t s = 0;
  while (s < n) {
    std::size_t e = s;
    while (e + 1 < n && sorted[e + 1] == sorted[s]) ++e;
    distinct->push_back(sorted[s]);
    positions->push_back(static_cast<double>(s + e + 1) / (2.0 * static_cast<double>(n)));
    s = e + 1;
  }
}

}  // namespace

RankMap RankMap::fit_numeric(std::vector<double> values) {
  if (values.empty()) {
    fail(ErrorCode::invalid_argument, "rank map fit on empty input");
  }
  for (double v : values) {
    if (std::isnan(v)) {
      fail(ErrorCode::invalid_argument, "rank map fit on NaN value");
    }
  }
  std::sort(values.begin(), values.end());
  RankMap m;
  m.kind_ = RankMapKind::empirical;
  m.numeric_ = true;
  m.n_ = values.size();
  group_positions(values, &m.values_, &m.positions_);
  return m;
}

RankMap RankMap::fit_text(std::vector<std::string> values) {
  if (values.empty()) {
    fail(ErrorCode::invalid_argument, "rank map fit on empty input");
  }
  std::sort(values.begin(), values.end());
  RankMap m;
  m.kind_ = RankMapKind::empirical;
  m.numeric_ = false;
  m.n_ = values.size();
  group_positions(values, &m.text_values_, &m.positions_);
  return m;
}

RankMap RankMap::analytic_redshift() {
  RankMap m;
  m.kind_ = RankMapKind::redshift_analytic;
  m.numeric_ = true;
  return m;
}

double RankMap::to_uniform(double value) const {
  if (kind_ == RankMapKind::redshift_analytic) {
    return redshift_transform(value);
  }
  if (!numeric_) {
    fail(ErrorCode::unsupported, "numeric lookup on a textual rank map");
  }
  if (n_ == 0) {
    fail(ErrorCode::invalid_argument, "rank map not fitted");
  }
  if (std::isnan(value)) {
    fail(ErrorCode::invalid_argument, "cannot normalize NaN");
  }
  const double lo = 0.5 / static_cast<double>(n_);
  const double hi = 1.0 - 0.5 / static_cast<double>(n_);
  auto it = std::lower_bound(values_.begin(), values_.end(), value);
  if (it != values_.end() && *it == value) {
    return positions_[static_cast<std::size_t>(it - values_.begin())];
  }
  if (it == values_.begin()) return lo;
  if (it == values_.end()) return hi;
  const std::size_t j = static_cast<std::size_t>(it - values_.begin());
  const double v0 = values_[j - 1], v1 = values_[j];
  const double p0 = positions_[j - 1], p1 = positions_[j];
  const double u = p0 + (p1 - p0) * (value - v0) / (v1 - v0);
  return std::clamp(u, lo, hi);
}

double RankMap::to_uniform(const std::string& level) const {
  if (numeric_) {
    fail(ErrorCode::unsupported, "textual lookup on a numeric rank map");
  }
  auto it = std::lower_bound(text_values_.begin(), text_values_.end(), level);
  if (it == text_values_.end() || *it != level) {
    fail(ErrorCode::invalid_argument, "unknown category: \"" + level + "\"");
  }
  return positions_[static_cast<std::size_t>(it - text_values_.begin())];
}

double RankMap::from_uniform(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) {
    fail(ErrorCode::invalid_argument, "from_uniform argument outside [0,1]");
  }
  if (kind_ == RankMapKind::redshift_analytic) {
    if (u >= 1.0) {
      fail(ErrorCode::invalid_argument, "redshift inverse undefined at 1");
    }
    return redshift_inverse(u);
  }
  if (!numeric_) {
    fail(ErrorCode::unsupported, "rank map inverse unsupported for textual values");
  }
  if (n_ == 0) {
    fail(ErrorCode::invalid_argument, "rank map not fitted");
  }
  if (u <= positions_.front()) return values_.front();
  if (u >= positions_.back()) return values_.back();
  auto it = std::lower_bound(positions_.begin(), positions_.end(), u);
  const std::size_t j = static_cast<std::size_t>(it - positions_.begin());
  if (positions_[j] == u) return values_[j];
  const double p0 = positions_[j - 1], p1 = positions_[j];
  const double v0 = values_[j - 1], v1 = values_[j];
  return v0 + (v1 - v0) * (u - p0) / (p1 - p0);
}

RankMap RankMap::restore(RankMapKind kind, bool numeric, std::size_t n,
                         std::vector<double> values,
                         std::vector<std::string> text_values,
                         std::vector<double> positions) {
  RankMap m;
  m.kind_ = kind;
  m.numeric_ = numeric;
  m.n_ = n;
  m.values_ = std::move(values);
  m.text_values_ = std::move(text_values);
  m.positions_ = std::move(positions);
  return m;
}

}  // namespace hcr
