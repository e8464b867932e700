#include "core/cca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace hcr {

std::pair<Eigen::MatrixXd, Eigen::VectorXd> covariance(const Eigen::MatrixXd& rows) {
  const Eigen::Index n = rows.rows();
  if (n < 2) {
    fail(ErrorCode::invalid_argument, "covariance needs n >= 2");
  }
  Eigen::VectorXd mean = rows.colwise().mean();
  Eigen::MatrixXd centered = rows.rowwise() - mean.transpose();
  Eigen::MatrixXd c = centered.transpose() * centered / static_cast<double>(n);
  c = ((c + c.transpose()) * 0.5).eval();
  return {std::move(c), std::move(mean)};
}

Eigen::MatrixXd whiten(const Eigen::MatrixXd& c, double ridge) {
  if (c.rows() != c.cols()) {
    fail(ErrorCode::invalid_argument, "whiten needs a square matrix");
  }
  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    fail(ErrorCode::invalid_argument, "whiten needs a symmetric matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
  if (eig.info() != Eigen::Success) {
    fail(ErrorCode::internal, "eigendecomposition failed");
  }
  Eigen::VectorXd d = eig.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double shifted = d(i) + ridge;
    d(i) = shifted > 0.0 ? 1.0 / std::sqrt(shifted) : 0.0;
  }
  return eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();
}

CcaResult cca_fit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int r,
                  double ridge) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  const Eigen::Index m = y.cols();
  if (n != y.rows()) {
    fail(ErrorCode::invalid_argument, "row counts differ between the two views");
  }
  if (n < 2) {
    fail(ErrorCode::invalid_argument, "cca needs n >= 2");
  }
  if (r < 1 || r > std::min(p, m)) {
    fail(ErrorCode::invalid_argument,
         "requested " + std::to_string(r) + " direction pairs, limit is " +
             std::to_string(std::min(p, m)));
  }

  auto [cxx, x_mean] = covariance(x);
  auto [cyy, y_mean] = covariance(y);
  Eigen::MatrixXd xc = x.rowwise() - x_mean.transpose();
  Eigen::MatrixXd yc = y.rowwise() - y_mean.transpose();
  Eigen::MatrixXd cxy = xc.transpose() * yc / static_cast<double>(n);

  const double ridge_x =
      ridge >= 0.0 ? ridge : std::max(1e-8 * cxx.trace() / static_cast<double>(p), 0.0);
  const double ridge_y =
      ridge >= 0.0 ? ridge : std::max(1e-8 * cyy.trace() / static_cast<double>(m), 0.0);
  Eigen::MatrixXd wx = whiten(cxx, ridge_x);
  Eigen::MatrixXd wy = whiten(cyy, ridge_y);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(wx * cxy * wy,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);

  CcaResult result;
  result.x_directions.resize(p, r);
  result.y_directions.resize(m, r);
  result.correlations.resize(r);
  result.x_mean = std::move(x_mean);
  result.y_mean = std::move(y_mean);

  for (int k = 0; k < r; ++k) {
    Eigen::VectorXd a = wx * svd.matrixU().col(k);
    Eigen::VectorXd b = wy * svd.matrixV().col(k);

    Eigen::VectorXd u = xc * a;
    Eigen::VectorXd v = yc * b;
    const double var_u = u.squaredNorm() / static_cast<double>(n);
    const double var_v = v.squaredNorm() / static_cast<double>(n);
    if (var_u > 1e-300) a /= std::sqrt(var_u);
    if (var_v > 1e-300) b /= std::sqrt(var_v);

    Eigen::Index pivot = 0;
    b.cwiseAbs().maxCoeff(&pivot);
    if (b(pivot) < 0.0) {
      a = -a;
      b = -b;
    }

    const double denom = u.norm() * v.norm();
    double corr = denom > 0.0 ? u.dot(v) / denom : 0.0;
    corr = std::clamp(corr, 0.0, 1.0);
    if (k > 0) corr = std::min(corr, result.correlations(k - 1));

    result.x_directions.col(k) = a;
    result.y_directions.col(k) = b;
    result.correlations(k) = corr;
  }
  return result;
}

Eigen::MatrixXd project(const CcaResult& result, CcaSide side,
                        const Eigen::MatrixXd& rows) {
  const Eigen::MatrixXd& dirs =
      side == CcaSide::x ? result.x_directions : result.y_directions;
  const Eigen::VectorXd& mean = side == CcaSide::x ? result.x_mean : result.y_mean;
  if (rows.cols() != dirs.rows()) {
    fail(ErrorCode::invalid_argument,
         "projection expects width " + std::to_string(dirs.rows()) + ", got " +
             std::to_string(rows.cols()));
  }
  return (rows.rowwise() - mean.transpose()) * dirs;
}

Eigen::MatrixXd gram_schmidt_columns(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd q(m.rows(), m.cols());
  Eigen::Index kept = 0;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Eigen::VectorXd v = m.col(c);
    // Two projection passes for numerical stability.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < kept; ++k) {
        v -= q.col(k).dot(v) * q.col(k);
      }
    }
    const double norm = v.norm();
    if (norm > 1e-12) {
      q.col(kept++) = v / norm;
    }
  }
  return q.leftCols(kept);
}

}  // namespace hcr
