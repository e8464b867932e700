#include "core/lasso.hpp"

#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace hcr {

namespace {

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

LassoModel lasso_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     double lambda, const LassoOptions& options) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (n != y.size()) {
    fail(ErrorCode::invalid_argument, "design and target lengths differ");
  }
  if (n < 1) {
    fail(ErrorCode::invalid_argument, "lasso needs at least one row");
  }
  if (lambda < 0.0) {
    fail(ErrorCode::invalid_argument, "lambda must be nonnegative");
  }
  if (!x.allFinite() || !y.allFinite()) {
    fail(ErrorCode::invalid_argument, "lasso inputs must be finite");
  }

  LassoModel model;
  model.lambda = lambda;
  model.coefficients = Eigen::VectorXd::Zero(p);
  model.intercept = y.mean();

  const Eigen::VectorXd colsq = x.colwise().squaredNorm();
  const double threshold = lambda / 2.0;
  Eigen::VectorXd residual = y.array() - model.intercept;

  auto update_coefficient = [&](Eigen::Index k) -> double {
    if (colsq(k) <= 0.0) return 0.0;
    const double old = model.coefficients(k);
    const double rho = x.col(k).dot(residual) + old * colsq(k);
    const double next = soft_threshold(rho, threshold) / colsq(k);
    if (next != old) {
      residual -= (next - old) * x.col(k);
      model.coefficients(k) = next;
    }
    return std::abs(next - old);
  };
  auto update_intercept = [&]() -> double {
    const double shift = residual.mean();
    if (shift != 0.0) {
      model.intercept += shift;
      residual.array() -= shift;
    }
    return std::abs(shift);
  };
  auto record_objective = [&]() {
    if (options.objective_trace) {
      options.objective_trace->push_back(
          residual.squaredNorm() + lambda * model.coefficients.lpNorm<1>());
    }
  };

  int sweeps = 0;
  while (sweeps < options.max_sweeps) {
    // Full sweep. Converging here means a stationary point over all
    // coordinates, so it doubles as the final check after active-set cycles.
    double delta = update_intercept();
    for (Eigen::Index k = 0; k < p; ++k) {
      delta = std::max(delta, update_coefficient(k));
    }
    ++sweeps;
    record_objective();
    if (delta < options.tol) break;

    std::vector<Eigen::Index> active;
    for (Eigen::Index k = 0; k < p; ++k) {
      if (model.coefficients(k) != 0.0) active.push_back(k);
    }
    while (sweeps < options.max_sweeps) {
      double inner = update_intercept();
      for (Eigen::Index k : active) {
        inner = std::max(inner, update_coefficient(k));
      }
      ++sweeps;
      record_objective();
      if (inner < options.tol) break;
    }
  }
  return model;
}

Eigen::VectorXd predict_linear(const LassoModel& model, const Eigen::MatrixXd& rows) {
  if (rows.cols() != model.coefficients.size()) {
    fail(ErrorCode::invalid_argument,
         "prediction expects width " + std::to_string(model.coefficients.size()) +
             ", got " + std::to_string(rows.cols()));
  }
  return (rows * model.coefficients).array() + model.intercept;
}

double lasso_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                       const LassoModel& model) {
  const Eigen::VectorXd residual = y - predict_linear(model, x);
  return residual.squaredNorm() + model.lambda * model.coefficients.lpNorm<1>();
}

}  // namespace hcr
