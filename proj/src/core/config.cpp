#include "core/config.hpp"

#include <cctype>
#include <fstream>
#include <limits>

#include "core/dataset.hpp"
#include "core/errors.hpp"

namespace hcr {

const char* calibration_kind_name(CalibrationKind kind) {
  return kind == CalibrationKind::softplus_like ? "softplus_like" : "clip";
}

CalibrationKind parse_calibration_kind(const std::string& name) {
  if (name == "softplus_like") return CalibrationKind::softplus_like;
  if (name == "clip") return CalibrationKind::clip;
  fail(ErrorCode::invalid_argument,
       "unknown calibration \"" + name + "\" (softplus_like or clip)");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
  auto v = parse_number(value);
  if (!v) {
    fail(ErrorCode::invalid_argument,
         "config key \"" + key + "\" needs a number, got \"" + value + "\"");
  }
  return *v;
}

long long parse_integer(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  const long long i = static_cast<long long>(v);
  if (static_cast<double>(i) != v) {
    fail(ErrorCode::invalid_argument,
         "config key \"" + key + "\" needs an integer, got \"" + value + "\"");
  }
  return i;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "off" || value == "0" || value == "no") return false;
  fail(ErrorCode::invalid_argument,
       "config key \"" + key + "\" needs a boolean, got \"" + value + "\"");
}

}  // namespace

void apply_config_entry(RunConfig& config, const std::string& key,
                        const std::string& value) {
  if (key == "target") {
    config.target = value;
  } else if (key == "degree") {
    config.degree = static_cast<int>(parse_integer(key, value));
  } else if (key == "rank") {
    config.rank = static_cast<int>(parse_integer(key, value));
  } else if (key == "lambda") {
    config.lambda = parse_double(key, value);
  } else if (key == "folds") {
    config.folds = static_cast<int>(parse_integer(key, value));
  } else if (key == "lattice") {
    config.calibration.lattice_size = static_cast<int>(parse_integer(key, value));
  } else if (key == "calibration") {
    config.calibration.kind = parse_calibration_kind(value);
  } else if (key == "threshold") {
    config.relevance_threshold = parse_double(key, value);
  } else if (key == "pair_products") {
    config.pair_products = parse_bool(key, value);
  } else if (key == "seed") {
    config.seed = static_cast<std::uint64_t>(parse_integer(key, value));
  } else if (key == "target_transform") {
    if (value == "empirical") {
      config.target_transform = RankMapKind::empirical;
    } else if (value == "redshift") {
      config.target_transform = RankMapKind::redshift_analytic;
    } else {
      fail(ErrorCode::invalid_argument,
           "unknown target_transform \"" + value + "\" (empirical or redshift)");
    }
  } else if (key == "uniform_baseline") {
    config.uniform_baseline = parse_bool(key, value);
  } else if (key == "threads") {
    config.threads = static_cast<int>(parse_integer(key, value));
  } else if (key == "softplus_scale") {
    config.calibration.softplus_scale = parse_double(key, value);
  } else if (key == "softplus_offset") {
    config.calibration.softplus_offset = parse_double(key, value);
  } else if (key == "clip_floor") {
    config.calibration.clip_floor = parse_double(key, value);
  } else {
    fail(ErrorCode::invalid_argument, "unknown config key \"" + key + "\"");
  }
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::io, "cannot open config file \"" + path + "\"");
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string entry = trim(line);
    if (entry.empty()) continue;
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::parse, path + ":" + std::to_string(line_no) +
                                 ": expected key = value");
    }
    apply_config_entry(base, trim(entry.substr(0, eq)), trim(entry.substr(eq + 1)));
  }
  return base;
}

void validate(const RunConfig& config) {
  if (config.degree < 1) {
    fail(ErrorCode::invalid_argument, "degree must be >= 1");
  }
  if (config.rank < 1) {
    fail(ErrorCode::invalid_argument, "rank must be >= 1");
  }
  if (config.calibration.lattice_size < 16) {
    fail(ErrorCode::invalid_argument, "lattice must be >= 16");
  }
  if (config.folds < 2) {
    fail(ErrorCode::invalid_argument, "folds must be >= 2");
  }
  if (config.lambda < 0.0) {
    fail(ErrorCode::invalid_argument, "lambda must be nonnegative");
  }
  if (config.threads < 0) {
    fail(ErrorCode::invalid_argument, "threads must be nonnegative");
  }
  if (config.calibration.softplus_scale <= 0.0 ||
      config.calibration.softplus_offset <= 0.0) {
    fail(ErrorCode::invalid_argument, "softplus parameters must be positive");
  }
  if (config.calibration.clip_floor <= 0.0) {
    fail(ErrorCode::invalid_argument, "clip floor must be positive");
  }
}

}  // namespace hcr
