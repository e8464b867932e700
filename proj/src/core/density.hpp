#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "core/config.hpp"
#include "core/dataset.hpp"
#include "core/features.hpp"
#include "core/lasso.hpp"
#include "core/rank_map.hpp"

namespace hcr {

// A conditional density over the normalized target, piecewise constant on G
// equal cells with centers (g - 0.5)/G. Values are positive and average to 1.
struct PredictedDensity {
  Eigen::VectorXd lattice;
  Eigen::VectorXd raw_coefficients;  // predicted rotated coefficients
};

// Elementwise positivity map followed by renormalization to mean 1. A
// constant input lattice maps to exactly 1 everywhere.
PredictedDensity calibrate(const Eigen::VectorXd& raw_lattice,
                           const CalibrationConfig& config);

// ln(1 + exp(scale*x)/offset)/scale, switching to the exact asymptote
// x - ln(offset)/scale once scale*x > 30. Strictly increasing, always
// positive.
double softplus_like(double x, double scale, double offset);

// (mean, variance) of the normalized target under the density.
std::pair<double, double> moments(const PredictedDensity& pd);

// Inverse-CDF draws from the piecewise-constant density. Deterministic for a
// given seed, identical across platforms.
std::vector<double> sample_density(const PredictedDensity& pd, int count,
                                   std::uint64_t seed);

// One lattice cell mapped back to original target units.
struct MassInterval {
  double lower = 0.0;
  double upper = 0.0;
  double mass = 0.0;
};

// Conditional density model: rank-normalize the target, encode and
// standardize the context, rotate the target basis along the fitted
// correlation directions, and predict each rotated coefficient with a sparse
// linear model. Immutable after fit; prediction is read-only.
struct DensityModel {
  std::string target_name;
  RankMap target_map;
  FeatureEncoder encoder;
  Standardization standardization;
  Eigen::MatrixXd rotation;  // degree x rank, orthonormal columns
  std::vector<LassoModel> coefficient_models;
  CalibrationConfig calibration;
  int degree = 0;

  // Requires a dataset with the target set, every row's target present and
  // numeric, and n >= 20.
  static DensityModel fit(const Dataset& d, const RunConfig& config);

  int rank() const { return static_cast<int>(rotation.cols()); }

  // Predicted rotated coefficients for one row (context columns matched by
  // name; the target column is ignored if present).
  Eigen::VectorXd predict_coefficients(const Dataset& d, std::size_t row) const;

  // 1 + sum_i c_i f_i at the cell centers, where c = rotation * coefficients.
  // May go below zero; calibrate fixes that.
  Eigen::VectorXd raw_lattice(const Eigen::VectorXd& coefficients) const;

  Eigen::VectorXd predict_raw(const Dataset& d, std::size_t row) const;
  PredictedDensity predict(const Dataset& d, std::size_t row) const;

  // Calibrated density in the cell containing the normalized actual value.
  double density_at(const PredictedDensity& pd, double actual) const;
  // ln density_at for the row's own context.
  double log_likelihood(const Dataset& d, std::size_t row, double actual) const;

  // Maps each cell through the inverse target normalization. Masses sum to
  // 1; requires a numeric target.
  std::vector<MassInterval> to_original_scale(const PredictedDensity& pd) const;

  // Recomputes the cached cell-center basis table. Must be called after
  // filling the fields directly (deserialization).
  void rebuild_cache();
  // Structural invariant checks (orthonormal rotation, consistent widths).
  void check() const;

 private:
  Eigen::MatrixXd lattice_basis_;  // G x degree
};

}  // namespace hcr
