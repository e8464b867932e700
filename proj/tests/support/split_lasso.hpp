#pragma once

#include <Eigen/Dense>

namespace oracle {

// Minimum of ||y - c0 - X c||^2 + lambda * sum|c| found without coordinate
// descent: write c = cp - cn with cp, cn >= 0, making the objective smooth
// plus nonnegativity constraints, and run accelerated projected gradient.
// Returns the objective value at the reached minimizer.
double split_lasso_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             double lambda, int iters = 20000);

}  // namespace oracle
