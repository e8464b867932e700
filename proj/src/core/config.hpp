#pragma once

#include <cstdint>
#include <string>

#include "core/rank_map.hpp"

namespace hcr {

enum class CalibrationKind { softplus_like, clip };

const char* calibration_kind_name(CalibrationKind kind);
CalibrationKind parse_calibration_kind(const std::string& name);

struct CalibrationConfig {
  CalibrationKind kind = CalibrationKind::softplus_like;
  int lattice_size = 1000;
  // softplus_like: phi(r) = ln(1 + exp(scale*r)/offset) / scale
  double softplus_scale = 3.0;
  double softplus_offset = 4.0;
  // clip: phi(r) = max(r, floor)
  double clip_floor = 0.1;
};

struct RunConfig {
  std::string target;
  int degree = 10;  // target basis functions per continuous column
  int rank = 4;     // rotated coefficients predicted by regression
  double lambda = 50.0;
  int folds = 10;
  CalibrationConfig calibration;
  double relevance_threshold = 0.01;
  bool pair_products = false;
  std::uint64_t seed = 0;
  // Target normalization: empirical rank map, or the z/(1+z) analytic map
  // for nonnegative unbounded targets.
  RankMapKind target_transform = RankMapKind::empirical;
  // Skips coefficient fitting entirely, predicting the uniform density for
  // every row. Gives the exact zero log-likelihood reference.
  bool uniform_baseline = false;
  int threads = 0;  // fold parallelism; 0 picks the hardware count
};

// Sets one field from its text form. Keys mirror the CLI flag names
// (target, degree, rank, lambda, folds, lattice, calibration, threshold,
// pair_products, seed, target_transform, uniform_baseline, threads,
// softplus_scale, softplus_offset, clip_floor). Unknown keys or unparseable
// values are errors.
void apply_config_entry(RunConfig& config, const std::string& key,
                        const std::string& value);

// Reads a flat "key = value" file over base. '#' starts a comment; blank
// lines are skipped.
RunConfig load_config_file(const std::string& path, RunConfig base = {});

// Range checks (degree >= 1, rank >= 1, lattice >= 16, folds >= 2,
// lambda >= 0, threads >= 0). Called by the pipeline entry points.
void validate(const RunConfig& config);

}  // namespace hcr
