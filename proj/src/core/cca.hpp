#pragma once

#include <Eigen/Dense>
#include <utility>

namespace hcr {

// Paired linear directions maximizing correlation between two views of the
// same sample. Directions are scaled to unit projected sample variance;
// correlations are nonincreasing and clipped to [0,1].
struct CcaResult {
  Eigen::MatrixXd x_directions;  // p x r
  Eigen::MatrixXd y_directions;  // m x r
  Eigen::VectorXd correlations;  // r entries
  Eigen::VectorXd x_mean;
  Eigen::VectorXd y_mean;
};

enum class CcaSide { x, y };

// Population covariance (1/n) and the column means. n >= 2 required.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> covariance(const Eigen::MatrixXd& rows);

// Inverse square root of (c + ridge*I) from a symmetric eigendecomposition.
// Nonpositive shifted eigenvalues contribute nothing (pseudo-inverse).
Eigen::MatrixXd whiten(const Eigen::MatrixXd& c, double ridge);

// Whiten both views, take the SVD of the whitened cross-covariance, and map
// the singular vectors back. ridge < 0 selects the default
// 1e-8 * trace(C)/dim per view; one-hot feature blocks make the feature
// covariance exactly singular, so some regularization is always needed.
CcaResult cca_fit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int r,
                  double ridge = -1.0);

// Centers rows with the stored mean of the chosen side and applies its
// directions.
Eigen::MatrixXd project(const CcaResult& result, CcaSide side,
                        const Eigen::MatrixXd& rows);

// Orthonormalizes columns left to right, dropping columns that are linearly
// dependent on earlier ones. May return fewer columns than given.
Eigen::MatrixXd gram_schmidt_columns(const Eigen::MatrixXd& m);

}  // namespace hcr
