#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hcr {

enum class RankMapKind { empirical, redshift_analytic };

// y = z/(1+z), maps [0,inf) to [0,1). Requires z >= 0.
double redshift_transform(double z);
// z = y/(1-y); undefined at y = 1.
double redshift_inverse(double y);

// Normalizer mapping a variable to a nearly uniform distribution on [0,1]
// through its empirical distribution function. Training values are ranked;
// the tie group spanning 1-based ranks i_min..i_max is assigned the central
// position (i_max + i_min - 1)/(2n), which reduces to (i - 0.5)/n when the
// value is unique. Immutable after fit.
class RankMap {
public:
  RankMap() = default;

  static RankMap fit_numeric(std::vector<double> values);
  static RankMap fit_text(std::vector<std::string> values);
  static RankMap analytic_redshift();

  // Training values map to their assigned position. Unseen numeric values
  // interpolate linearly between neighboring distinct training positions and
  // clamp to [0.5/n, 1-0.5/n] outside the training range.
  double to_uniform(double value) const;
  // Textual maps only; unseen level is an unknown-category error.
  double to_uniform(const std::string& level) const;

  // Piecewise-linear inverse of to_uniform; u below the first (above the
  // last) assigned position clamps to the extreme training value. Numeric
  // maps only.
  double from_uniform(double u) const;

  RankMapKind kind() const { return kind_; }
  bool numeric() const { return numeric_; }
  std::size_t fitted_count() const { return n_; }
  const std::vector<double>& distinct_values() const { return values_; }
  const std::vector<std::string>& distinct_text_values() const { return text_values_; }
  const std::vector<double>& positions() const { return positions_; }

  // Serialization support; inputs must satisfy the class invariants.
  static RankMap restore(RankMapKind kind, bool numeric, std::size_t n,
                         std::vector<double> values,
                         std::vector<std::string> text_values,
                         std::vector<double> positions);

private:
  RankMapKind kind_ = RankMapKind::empirical;
  bool numeric_ = true;
  std::size_t n_ = 0;                     // fitted sample size
  std::vector<double> values_;            // distinct training values, ascending
  std::vector<std::string> text_values_;  // distinct levels, lexicographic
  std::vector<double> positions_;         // one position per distinct value
};

}  // namespace hcr
