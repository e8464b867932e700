#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/errors.hpp"
#include "core/evaluate.hpp"
#include "support/stats.hpp"
#include "support/tempdir.hpp"

using hcr::Dataset;
using hcr::RunConfig;

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Continuous target driven by one informative column, one constant column,
// one duplicated column, and one noise column.
Dataset scored_table(int n, std::uint64_t seed) {
  oracle::Rng rng(seed);
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < n; ++i) {
    double t = rng.normal();
    std::string info = fmt17(t + 0.4 * rng.normal());
    rows.push_back({info, info, "3.25", fmt17(rng.normal()), fmt17(t)});
  }
  auto d = Dataset::from_rows({"info", "twin", "constant", "noise", "y"}, rows);
  d.set_target("y");
  return d;
}

}  // namespace

TEST_CASE("fold assignment covers every row once with balanced sizes") {
  auto folds = hcr::kfold_split(1767, 10, 0);
  REQUIRE(folds.size() == 10);
  std::vector<std::size_t> sizes;
  std::set<std::size_t> seen;
  for (const auto& fold : folds) {
    sizes.push_back(fold.size());
    CHECK(std::is_sorted(fold.begin(), fold.end()));
    for (std::size_t idx : fold) {
      CHECK(idx < 1767);
      CHECK(seen.insert(idx).second);  // no duplicates across folds
    }
  }
  CHECK(seen.size() == 1767);
  std::sort(sizes.begin(), sizes.end());
  // 1767 = 7 * 177 + 3 * 176.
  CHECK(std::count(sizes.begin(), sizes.end(), 176) == 3);
  CHECK(std::count(sizes.begin(), sizes.end(), 177) == 7);

  auto tiny = hcr::kfold_split(10, 10, 4);
  for (const auto& fold : tiny) CHECK(fold.size() == 1);

  CHECK_THROWS_AS((void)hcr::kfold_split(5, 10, 0), hcr::Error);
  CHECK_THROWS_AS((void)hcr::kfold_split(50, 1, 0), hcr::Error);
}

TEST_CASE("fold assignment is deterministic in the seed") {
  auto a = hcr::kfold_split(500, 7, 42);
  auto b = hcr::kfold_split(500, 7, 42);
  CHECK(a == b);
  auto c = hcr::kfold_split(500, 7, 43);
  CHECK(a != c);
}

TEST_CASE("cross validation separates signal from independence") {
  RunConfig config;
  config.target = "y";
  config.folds = 5;

  // Dependent data scores clearly above zero.
  auto d = scored_table(600, 5);
  auto report = hcr::cross_validate(d, config);
  CHECK(report.folds == 5);
  CHECK(report.per_point.size() == 600);
  CHECK(report.fold_log_likelihoods.size() == 5);
  CHECK(report.mean_log_likelihood > 0.2);
  CHECK(report.fraction_below_one > 0.0);
  CHECK(report.fraction_below_one < 1.0);

  // The per-point table is in row order and consistent with the mean.
  double total = 0.0;
  for (std::size_t r = 0; r < report.per_point.size(); ++r) {
    CHECK(report.per_point[r].point_id == r);
    CHECK(report.per_point[r].density_at_actual > 0.0);
    total += std::log(report.per_point[r].density_at_actual);
  }
  CHECK(report.mean_log_likelihood ==
        doctest::Approx(total / 600.0).epsilon(0).margin(1e-12));

  // Independent target: scores near zero.
  oracle::Rng rng(6);
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < 600; ++i) {
    rows.push_back({fmt17(rng.normal()), fmt17(rng.normal())});
  }
  auto indep = Dataset::from_rows({"x", "y"}, rows);
  indep.set_target("y");
  auto flat = hcr::cross_validate(indep, config);
  CHECK(std::abs(flat.mean_log_likelihood) < 0.05);
}

TEST_CASE("uniform baseline cross validates to exactly zero") {
  auto d = scored_table(200, 9);
  RunConfig config;
  config.target = "y";
  config.uniform_baseline = true;
  auto report = hcr::cross_validate(d, config);
  CHECK(report.mean_log_likelihood == 0.0);
  for (double fold_ll : report.fold_log_likelihoods) {
    CHECK(fold_ll == 0.0);
  }
  CHECK(report.fraction_below_one == 0.0);
}

TEST_CASE("cross validation is reproducible and thread-count independent") {
  auto d = scored_table(240, 13);
  RunConfig config;
  config.target = "y";
  config.folds = 6;

  config.threads = 1;
  auto serial = hcr::cross_validate(d, config);
  config.threads = 4;
  auto parallel = hcr::cross_validate(d, config);
  CHECK(hcr::report_text(serial) == hcr::report_text(parallel));
  CHECK(serial.mean_log_likelihood == parallel.mean_log_likelihood);

  config.seed = 99;
  auto reseeded = hcr::cross_validate(d, config);
  CHECK(hcr::report_text(reseeded) != hcr::report_text(serial));
}

TEST_CASE("cross validation insists on a complete target column") {
  oracle::Rng rng(15);
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < 100; ++i) {
    rows.push_back({fmt17(rng.normal()), i == 50 ? "" : fmt17(rng.normal())});
  }
  auto d = Dataset::from_rows({"x", "y"}, rows);
  d.set_target("y");
  RunConfig config;
  config.target = "y";
  CHECK_THROWS_WITH_AS((void)hcr::cross_validate(d, config),
                       doctest::Contains("filter rows"), hcr::Error);
}

TEST_CASE("relevance ranks informative above constant and noise") {
  auto d = scored_table(500, 21);
  RunConfig config;
  config.target = "y";
  config.folds = 5;

  double info = hcr::relevance(d, "info", config);
  double constant = hcr::relevance(d, "constant", config);
  double noise = hcr::relevance(d, "noise", config);
  CHECK(info > 0.2);
  CHECK(std::abs(constant) < 0.03);
  CHECK(std::abs(noise) < 0.05);
  CHECK(info > noise);
}

TEST_CASE("a duplicated column has relevance but no novelty") {
  auto d = scored_table(500, 27);
  RunConfig config;
  config.target = "y";
  config.folds = 5;

  double twin_rel = hcr::relevance(d, "twin", config);
  CHECK(twin_rel > 0.2);
  double twin_nov = hcr::novelty(d, "twin", config);
  CHECK(std::abs(twin_nov) < 0.02);
}

TEST_CASE("variable scores combine relevance, novelty, and selection") {
  auto d = scored_table(400, 33);
  RunConfig config;
  config.target = "y";
  config.folds = 4;
  config.relevance_threshold = 0.05;

  auto scores = hcr::variable_scores(d, config, true);
  REQUIRE(scores.size() == 4);
  CHECK(scores[0].name == "info");
  CHECK(scores[1].name == "twin");
  CHECK(scores[2].name == "constant");
  CHECK(scores[3].name == "noise");
  for (const auto& s : scores) CHECK(s.has_novelty);
  CHECK(scores[0].selected);
  CHECK_FALSE(scores[2].selected);
  CHECK(scores[0].relevance > config.relevance_threshold);

  auto quick = hcr::variable_scores(d, config, false);
  for (const auto& s : quick) CHECK_FALSE(s.has_novelty);
  CHECK(quick[0].relevance == scores[0].relevance);
}

TEST_CASE("report text is stable and carries the headline numbers") {
  auto d = scored_table(120, 39);
  RunConfig config;
  config.target = "y";
  config.folds = 4;
  auto report = hcr::cross_validate(d, config);
  auto text = hcr::report_text(report);
  CHECK(text.rfind("hcr_cv_report v1\n", 0) == 0);
  CHECK(text.find("target y\n") != std::string::npos);
  CHECK(text.find("folds 4\n") != std::string::npos);
  CHECK(text.find("points 120\n") != std::string::npos);
  CHECK(text.find("mean_log_likelihood ") != std::string::npos);
  CHECK(text.find("fraction_below_one ") != std::string::npos);
  CHECK(text.find("point_id\tdensity_at_actual\tmean\tvariance") != std::string::npos);
  // One line per point plus the preamble.
  std::size_t lines = static_cast<std::size_t>(
      std::count(text.begin(), text.end(), '\n'));
  CHECK(lines >= 120 + 8);

  oracle::TempDir dir;
  auto path = dir.file("report.tsv");
  hcr::write_report(report, path);
  CHECK(oracle::read_file(path) == text);
}

TEST_CASE("plot data files are written with consistent contents") {
  auto d = scored_table(150, 45);
  RunConfig config;
  config.target = "y";
  config.folds = 5;
  auto report = hcr::cross_validate(d, config);
  auto scores = hcr::variable_scores(d, config, false);

  oracle::TempDir dir;
  hcr::emit_plot_data(report, d, config, dir.path().string(), "constant", &scores);

  auto sorted_density = oracle::read_file(dir.file("sorted_density.tsv"));
  CHECK(sorted_density.rfind("# fraction_below_one\t", 0) == 0);

  auto mean_sd = oracle::read_file(dir.file("mean_vs_sd.tsv"));
  CHECK(mean_sd.find("predicted_sd") != std::string::npos);
  // sd column is the square root of the reported variance.
  std::size_t header_end = mean_sd.find('\n');
  std::size_t line_end = mean_sd.find('\n', header_end + 1);
  std::string first = mean_sd.substr(header_end + 1, line_end - header_end - 1);
  // point_id, mean, sd, color columns.
  double mean_v = 0, sd_v = 0;
  {
    std::size_t tab1 = first.find('\t');
    std::size_t tab2 = first.find('\t', tab1 + 1);
    std::size_t tab3 = first.find('\t', tab2 + 1);
    mean_v = std::stod(first.substr(tab1 + 1, tab2 - tab1 - 1));
    sd_v = std::stod(first.substr(tab2 + 1, tab3 - tab2 - 1));
  }
  CHECK(sd_v == doctest::Approx(std::sqrt(report.per_point[0].variance))
                    .epsilon(0)
                    .margin(1e-12));
  CHECK(mean_v == doctest::Approx(report.per_point[0].mean).epsilon(0).margin(1e-12));

  auto actual_vs_mean = oracle::read_file(dir.file("actual_vs_mean.tsv"));
  CHECK(actual_vs_mean.find("actual") != std::string::npos);

  auto var_scores = oracle::read_file(dir.file("variable_scores.tsv"));
  CHECK(var_scores.find("info\t") != std::string::npos);
  CHECK(var_scores.find("novelty") != std::string::npos);
}
