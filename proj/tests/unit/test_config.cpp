#include <doctest.h>

#include "core/config.hpp"
#include "core/errors.hpp"
#include "support/tempdir.hpp"

using hcr::CalibrationKind;
using hcr::RunConfig;

TEST_CASE("defaults match the documented values") {
  RunConfig c;
  CHECK(c.target.empty());
  CHECK(c.degree == 10);
  CHECK(c.rank == 4);
  CHECK(c.lambda == 50.0);
  CHECK(c.folds == 10);
  CHECK(c.calibration.kind == CalibrationKind::softplus_like);
  CHECK(c.calibration.lattice_size == 1000);
  CHECK(c.calibration.softplus_scale == 3.0);
  CHECK(c.calibration.softplus_offset == 4.0);
  CHECK(c.calibration.clip_floor == 0.1);
  CHECK(c.relevance_threshold == 0.01);
  CHECK_FALSE(c.pair_products);
  CHECK(c.seed == 0);
  CHECK(c.target_transform == hcr::RankMapKind::empirical);
  CHECK_FALSE(c.uniform_baseline);
  CHECK(c.threads == 0);
  CHECK_NOTHROW(hcr::validate(c));
}

TEST_CASE("entries parse and apply by key") {
  RunConfig c;
  hcr::apply_config_entry(c, "target", "Redshift");
  hcr::apply_config_entry(c, "degree", "7");
  hcr::apply_config_entry(c, "rank", "2");
  hcr::apply_config_entry(c, "lambda", "12.5");
  hcr::apply_config_entry(c, "folds", "5");
  hcr::apply_config_entry(c, "lattice", "500");
  hcr::apply_config_entry(c, "calibration", "clip");
  hcr::apply_config_entry(c, "threshold", "0.05");
  hcr::apply_config_entry(c, "pair_products", "true");
  hcr::apply_config_entry(c, "seed", "99");
  hcr::apply_config_entry(c, "target_transform", "redshift");
  hcr::apply_config_entry(c, "uniform_baseline", "1");
  hcr::apply_config_entry(c, "threads", "2");

  CHECK(c.target == "Redshift");
  CHECK(c.degree == 7);
  CHECK(c.rank == 2);
  CHECK(c.lambda == 12.5);
  CHECK(c.folds == 5);
  CHECK(c.calibration.lattice_size == 500);
  CHECK(c.calibration.kind == CalibrationKind::clip);
  CHECK(c.relevance_threshold == 0.05);
  CHECK(c.pair_products);
  CHECK(c.seed == 99);
  CHECK(c.target_transform == hcr::RankMapKind::redshift_analytic);
  CHECK(c.uniform_baseline);
  CHECK(c.threads == 2);

  CHECK_THROWS_AS(hcr::apply_config_entry(c, "unknown_key", "1"), hcr::Error);
  CHECK_THROWS_AS(hcr::apply_config_entry(c, "degree", "abc"), hcr::Error);
  CHECK_THROWS_AS(hcr::apply_config_entry(c, "calibration", "sigmoid"), hcr::Error);
  CHECK_THROWS_AS(hcr::apply_config_entry(c, "pair_products", "maybe"), hcr::Error);
}

TEST_CASE("config files are flat key = value text") {
  oracle::TempDir dir;
  auto path = dir.file("run.conf");
  oracle::write_file(path,
                     "# run settings\n"
                     "target = z\n"
                     "\n"
                     "degree = 6   # trailing comment\n"
                     "lambda = 25\n");
  auto c = hcr::load_config_file(path);
  CHECK(c.target == "z");
  CHECK(c.degree == 6);
  CHECK(c.lambda == 25.0);
  CHECK(c.rank == 4);  // untouched default

  auto bad = dir.file("bad.conf");
  oracle::write_file(bad, "degree\n");
  CHECK_THROWS_WITH_AS((void)hcr::load_config_file(bad),
                       doctest::Contains("bad.conf:1"), hcr::Error);
  CHECK_THROWS_AS((void)hcr::load_config_file(dir.file("absent.conf")),
                  hcr::Error);
}

TEST_CASE("validation rejects out-of-range settings") {
  auto broken = [](auto mutate) {
    RunConfig c;
    mutate(c);
    CHECK_THROWS_AS(hcr::validate(c), hcr::Error);
  };
  broken([](RunConfig& c) { c.degree = 0; });
  broken([](RunConfig& c) { c.rank = 0; });
  broken([](RunConfig& c) { c.calibration.lattice_size = 15; });
  broken([](RunConfig& c) { c.folds = 1; });
  broken([](RunConfig& c) { c.lambda = -0.1; });
  broken([](RunConfig& c) { c.threads = -1; });
  broken([](RunConfig& c) { c.calibration.softplus_scale = 0.0; });
  broken([](RunConfig& c) { c.calibration.clip_floor = 0.0; });
}

TEST_CASE("calibration kinds round trip through their names") {
  CHECK(hcr::parse_calibration_kind("softplus_like") == CalibrationKind::softplus_like);
  CHECK(hcr::parse_calibration_kind("clip") == CalibrationKind::clip);
  CHECK(std::string(hcr::calibration_kind_name(CalibrationKind::clip)) == "clip");
  CHECK(std::string(hcr::calibration_kind_name(CalibrationKind::softplus_like)) ==
        "softplus_like");
}
