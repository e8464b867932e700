#include "core/basis.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace hcr {

void eval_basis(const BasisSpec& spec, double y, double* out) {
  if (spec.degree < 1) {
    fail(ErrorCode::invalid_argument, "basis degree must be >= 1");
  }
  if (!(y >= 0.0 && y <= 1.0)) {
    fail(ErrorCode::invalid_argument,
         "basis argument outside [0,1]: " + std::to_string(y));
  }
  // Three-term recurrence on t = 2y-1; stable at degree ~10 where the
  // expanded monomial form would cancel catastrophically.
  const double t = 2.0 * y - 1.0;
  double p_prev = 1.0;  // P_0
  double p = t;         // P_1
  out[0] = std::sqrt(3.0) * p;
  for (int j = 2; j <= spec.degree; ++j) {
    const double p_next = ((2.0 * j - 1.0) * t * p - (j - 1.0) * p_prev) / j;
    p_prev = p;
    p = p_next;
    out[j - 1] = std::sqrt(2.0 * j + 1.0) * p;
  }
}

std::vector<double> eval_basis(const BasisSpec& spec, double y) {
  std::vector<double> out(static_cast<std::size_t>(spec.degree));
  eval_basis(spec, y, out.data());
  return out;
}

Eigen::MatrixXd basis_matrix(const BasisSpec& spec, const std::vector<double>& ys) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(ys.size()), spec.degree);
  std::vector<double> row(static_cast<std::size_t>(spec.degree));
  for (std::size_t t = 0; t < ys.size(); ++t) {
    eval_basis(spec, ys[t], row.data());
    for (int j = 0; j < spec.degree; ++j) {
      m(static_cast<Eigen::Index>(t), j) = row[static_cast<std::size_t>(j)];
    }
  }
  return m;
}

}  // namespace hcr
