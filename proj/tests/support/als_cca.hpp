#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace oracle {

// Largest achievable sample correlation between linear projections of the
// two (centered) views, found by alternating least squares: regress each
// side's projection on the other view in turn until the correlation stops
// improving. Independent of any whitening or SVD machinery.
double als_max_correlation(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                           int restarts = 8, int max_iters = 2000,
                           double tol = 1e-13, std::uint64_t seed = 1);

}  // namespace oracle
