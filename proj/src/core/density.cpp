#include "core/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "core/basis.hpp"
#include "core/cca.hpp"
#include "core/errors.hpp"

namespace hcr {

double softplus_like(double x, double scale, double offset) {
  const double t = scale * x;
  // Past t = 30 the 1 inside the logarithm is below double precision and
  // exp(t) would eventually overflow; the asymptote is exact there.
  const double v = t > 30.0 ? x - std::log(offset) / scale
                            : std::log1p(std::exp(t) / offset) / scale;
  return v > 0.0 ? v : std::numeric_limits<double>::min();
}

PredictedDensity calibrate(const Eigen::VectorXd& raw_lattice,
                           const CalibrationConfig& config) {
  const Eigen::Index g_count = raw_lattice.size();
  if (g_count != config.lattice_size) {
    fail(ErrorCode::invalid_argument, "raw lattice length does not match config");
  }
  if (!raw_lattice.allFinite()) {
    fail(ErrorCode::invalid_argument, "raw lattice must be finite");
  }
  PredictedDensity pd;
  pd.lattice.resize(g_count);
  for (Eigen::Index g = 0; g < g_count; ++g) {
    pd.lattice(g) =
        config.kind == CalibrationKind::softplus_like
            ? softplus_like(raw_lattice(g), config.softplus_scale,
                            config.softplus_offset)
            : std::max(raw_lattice(g), config.clip_floor);
  }
  if (pd.lattice.maxCoeff() == pd.lattice.minCoeff()) {
    // Constant densities normalize to exactly 1; dividing by the accumulated
    // mean would leave rounding residue.
    pd.lattice.setOnes();
  } else {
    pd.lattice /= pd.lattice.mean();
  }
  return pd;
}

std::pair<double, double> moments(const PredictedDensity& pd) {
  const Eigen::Index g_count = pd.lattice.size();
  if (g_count < 1) {
    fail(ErrorCode::invalid_argument, "empty density lattice");
  }
  const double inv = 1.0 / static_cast<double>(g_count);
  double mean = 0.0;
  for (Eigen::Index g = 0; g < g_count; ++g) {
    mean += (static_cast<double>(g) + 0.5) * inv * pd.lattice(g) * inv;
  }
  double var = 0.0;
  for (Eigen::Index g = 0; g < g_count; ++g) {
    const double y = (static_cast<double>(g) + 0.5) * inv;
    var += (y - mean) * (y - mean) * pd.lattice(g) * inv;
  }
  return {mean, var};
}

std::vector<double> sample_density(const PredictedDensity& pd, int count,
                                   std::uint64_t seed) {
  if (count < 1) {
    fail(ErrorCode::invalid_argument, "sample count must be >= 1");
  }
  const Eigen::Index g_count = pd.lattice.size();
  if (g_count < 1) {
    fail(ErrorCode::invalid_argument, "empty density lattice");
  }
  std::vector<double> cum(static_cast<std::size_t>(g_count));
  double run = 0.0;
  for (Eigen::Index g = 0; g < g_count; ++g) {
    run += pd.lattice(g) / static_cast<double>(g_count);
    cum[static_cast<std::size_t>(g)] = run;
  }
  const double total = cum.back();

  std::mt19937_64 eng(seed);
  std::vector<double> out(static_cast<std::size_t>(count));
  for (auto& v : out) {
    const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53 * total;
    const auto it = std::lower_bound(cum.begin(), cum.end(), u);
    const std::size_t g =
        it == cum.end() ? cum.size() - 1
                        : static_cast<std::size_t>(it - cum.begin());
    const double prev = g == 0 ? 0.0 : cum[g - 1];
    const double width = cum[g] - prev;
    const double frac = width > 0.0 ? (u - prev) / width : 0.5;
    v = (static_cast<double>(g) + std::min(frac, 1.0)) /
        static_cast<double>(g_count);
  }
  return out;
}

DensityModel DensityModel::fit(const Dataset& d, const RunConfig& config) {
  validate(config);
  if (d.target_index() < 0) {
    fail(ErrorCode::invalid_argument, "no target column set");
  }
  const auto tc = static_cast<std::size_t>(d.target_index());
  const std::size_t n = d.n_rows();
  if (n < 20) {
    fail(ErrorCode::invalid_argument,
         "fit needs at least 20 rows, got " + std::to_string(n));
  }

  std::vector<double> targets(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (d.missing(tc, r)) {
      fail(ErrorCode::invalid_argument,
           "target missing in row " + std::to_string(r + 1));
    }
    const double v = d.numeric(tc, r);
    if (!std::isfinite(v)) {
      fail(ErrorCode::invalid_argument,
           "target not numeric in row " + std::to_string(r + 1));
    }
    targets[r] = v;
  }

  DensityModel model;
  model.target_name = d.column(tc).name;
  model.degree = config.degree;
  model.calibration = config.calibration;
  if (config.target_transform == RankMapKind::redshift_analytic) {
    for (double v : targets) {
      if (v < 0.0) {
        fail(ErrorCode::invalid_argument,
             "negative target under the z/(1+z) transform");
      }
    }
    model.target_map = RankMap::analytic_redshift();
  } else {
    model.target_map = RankMap::fit_numeric(targets);
  }

  std::vector<double> us(n);
  for (std::size_t r = 0; r < n; ++r) {
    us[r] = model.target_map.to_uniform(targets[r]);
  }
  const Eigen::MatrixXd b = basis_matrix(BasisSpec{config.degree}, us);

  model.encoder.fit(d, config.degree, config.pair_products);
  FeatureMatrix fm = model.encoder.transform(d);
  model.standardization.fit(fm.values);
  model.standardization.apply_in_place(fm.values);

  const int p = model.encoder.width();
  int r_eff = std::min(config.rank, config.degree);
  if (config.uniform_baseline) {
    model.rotation = Eigen::MatrixXd::Identity(config.degree, r_eff);
    for (int s = 0; s < r_eff; ++s) {
      LassoModel zero;
      zero.lambda = config.lambda;
      zero.coefficients = Eigen::VectorXd::Zero(p);
      zero.target_name = "a" + std::to_string(s + 1);
      model.coefficient_models.push_back(std::move(zero));
    }
  } else {
    r_eff = std::min(r_eff, p);
    const CcaResult cca = cca_fit(fm.values, b, r_eff);
    model.rotation = gram_schmidt_columns(cca.y_directions);
    if (model.rotation.cols() < 1) {
      fail(ErrorCode::internal, "no usable correlation directions");
    }
    const Eigen::MatrixXd rotated = b * model.rotation;
    for (Eigen::Index s = 0; s < model.rotation.cols(); ++s) {
      LassoModel lm = lasso_fit(fm.values, rotated.col(s), config.lambda);
      lm.target_name = "a" + std::to_string(s + 1);
      model.coefficient_models.push_back(std::move(lm));
    }
  }
  model.rebuild_cache();
  model.check();
  return model;
}

Eigen::VectorXd DensityModel::predict_coefficients(const Dataset& d,
                                                   std::size_t row) const {
  Eigen::RowVectorXd x = encoder.transform_row(d, row);
  standardization.apply_in_place(x);
  Eigen::VectorXd out(static_cast<Eigen::Index>(coefficient_models.size()));
  for (std::size_t s = 0; s < coefficient_models.size(); ++s) {
    const LassoModel& lm = coefficient_models[s];
    out(static_cast<Eigen::Index>(s)) = lm.intercept + x.dot(lm.coefficients);
  }
  return out;
}

Eigen::VectorXd DensityModel::raw_lattice(const Eigen::VectorXd& coefficients) const {
  if (coefficients.size() != rotation.cols()) {
    fail(ErrorCode::invalid_argument, "coefficient count does not match model rank");
  }
  return Eigen::VectorXd::Ones(lattice_basis_.rows()) +
         lattice_basis_ * (rotation * coefficients);
}

Eigen::VectorXd DensityModel::predict_raw(const Dataset& d, std::size_t row) const {
  return raw_lattice(predict_coefficients(d, row));
}

PredictedDensity DensityModel::predict(const Dataset& d, std::size_t row) const {
  Eigen::VectorXd coefficients = predict_coefficients(d, row);
  PredictedDensity pd = calibrate(raw_lattice(coefficients), calibration);
  pd.raw_coefficients = std::move(coefficients);
  return pd;
}

double DensityModel::density_at(const PredictedDensity& pd, double actual) const {
  const double u = target_map.to_uniform(actual);
  const Eigen::Index g_count = pd.lattice.size();
  Eigen::Index g = static_cast<Eigen::Index>(u * static_cast<double>(g_count));
  g = std::clamp<Eigen::Index>(g, 0, g_count - 1);
  return pd.lattice(g);
}

double DensityModel::log_likelihood(const Dataset& d, std::size_t row,
                                    double actual) const {
  return std::log(density_at(predict(d, row), actual));
}

std::vector<MassInterval> DensityModel::to_original_scale(
    const PredictedDensity& pd) const {
  if (!target_map.numeric()) {
    fail(ErrorCode::unsupported, "original-scale masses need a numeric target");
  }
  const Eigen::Index g_count = pd.lattice.size();
  const bool analytic = target_map.kind() == RankMapKind::redshift_analytic;
  std::vector<MassInterval> out;
  out.reserve(static_cast<std::size_t>(g_count));
  for (Eigen::Index g = 0; g < g_count; ++g) {
    MassInterval cell;
    cell.lower = target_map.from_uniform(static_cast<double>(g) /
                                         static_cast<double>(g_count));
    cell.upper = analytic && g == g_count - 1
                     ? std::numeric_limits<double>::infinity()
                     : target_map.from_uniform(static_cast<double>(g + 1) /
                                               static_cast<double>(g_count));
    cell.mass = pd.lattice(g) / static_cast<double>(g_count);
    out.push_back(cell);
  }
  return out;
}

void DensityModel::rebuild_cache() {
  const int g_count = calibration.lattice_size;
  std::vector<double> centers(static_cast<std::size_t>(g_count));
  for (int g = 0; g < g_count; ++g) {
    centers[static_cast<std::size_t>(g)] =
        (static_cast<double>(g) + 0.5) / static_cast<double>(g_count);
  }
  lattice_basis_ = basis_matrix(BasisSpec{degree}, centers);
}

void DensityModel::check() const {
  if (degree < 1) {
    fail(ErrorCode::internal, "model degree must be >= 1");
  }
  if (rotation.rows() != degree || rotation.cols() < 1 ||
      rotation.cols() > degree) {
    fail(ErrorCode::internal, "rotation shape inconsistent with degree");
  }
  const Eigen::MatrixXd gram = rotation.transpose() * rotation;
  const Eigen::MatrixXd eye =
      Eigen::MatrixXd::Identity(rotation.cols(), rotation.cols());
  if ((gram - eye).cwiseAbs().maxCoeff() > 1e-8) {
    fail(ErrorCode::internal, "rotation columns are not orthonormal");
  }
  if (static_cast<Eigen::Index>(coefficient_models.size()) != rotation.cols()) {
    fail(ErrorCode::internal, "one coefficient model per rotation column required");
  }
  for (const auto& lm : coefficient_models) {
    if (lm.coefficients.size() != encoder.width() ||
        static_cast<int>(standardization.mean.size()) != encoder.width()) {
      fail(ErrorCode::internal, "feature width mismatch in coefficient models");
    }
  }
  if (calibration.lattice_size < 16) {
    fail(ErrorCode::internal, "lattice must be >= 16");
  }
  if (!target_map.numeric()) {
    fail(ErrorCode::internal, "target map must be numeric");
  }
}

}  // namespace hcr
