#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hcr {

// Orthonormal polynomial basis on [0,1]:
//   f_j(y) = sqrt(2j+1) * P_j(2y-1),  j = 1..m,
// with P_j the Legendre polynomial of degree j. The constant f_0 = 1 is
// implicit and never returned. Orthonormal under the uniform measure:
// integral of f_i*f_j over [0,1] is delta_ij.
struct BasisSpec {
  int degree = 10;  // m, highest basis index returned
};

// f_1..f_m at a single point; y must lie in [0,1]. `out` holds m entries.
void eval_basis(const BasisSpec& spec, double y, double* out);

std::vector<double> eval_basis(const BasisSpec& spec, double y);

// Row t holds eval_basis(spec, ys[t]); shape n x m.
Eigen::MatrixXd basis_matrix(const BasisSpec& spec, const std::vector<double>& ys);

}  // namespace hcr
