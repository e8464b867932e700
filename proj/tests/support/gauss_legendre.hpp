#pragma once

#include <functional>
#include <vector>

namespace oracle {

// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
// on the Legendre recurrence. Exact for polynomials up to degree 2n - 1.
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

Quadrature gauss_legendre(int n);

// Integral of f over [0, 1] using the mapped rule.
double integrate01(const Quadrature& q, const std::function<double(double)>& f);

}  // namespace oracle
