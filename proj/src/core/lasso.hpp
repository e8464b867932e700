#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace hcr {

struct LassoModel {
  double intercept = 0.0;
  Eigen::VectorXd coefficients;
  double lambda = 0.0;
  std::string target_name;
};

struct LassoOptions {
  double tol = 1e-7;       // max absolute coefficient change per full sweep
  int max_sweeps = 10000;  // hard cap, counting every sweep
  // When set, receives the objective value after each sweep. The sequence is
  // nonincreasing for exact coordinate updates.
  std::vector<double>* objective_trace = nullptr;
};

// Minimizes sum_t (y_t - c0 - sum_k c_k x_tk)^2 + lambda * sum_k |c_k| by
// cyclic coordinate descent with soft thresholding. The intercept is
// unpenalized. Inner cycles restrict to the active set between full sweeps.
LassoModel lasso_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     double lambda, const LassoOptions& options = {});

// c0 + rows * coefficients. Row width must match the model.
Eigen::VectorXd predict_linear(const LassoModel& model, const Eigen::MatrixXd& rows);

// The penalized objective of the model on (x, y); used by convergence checks
// and tests.
double lasso_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                       const LassoModel& model);

}  // namespace hcr
