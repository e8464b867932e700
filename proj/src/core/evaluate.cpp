#include "core/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "core/errors.hpp"

namespace hcr {

namespace {

// Runs fn(0..count-1) on up to `threads` workers. The first failing task's
// exception (lowest index) is rethrown after all workers join.
void run_parallel(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
  }
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::size_t require_target(const Dataset& d) {
  if (d.target_index() < 0) {
    fail(ErrorCode::invalid_argument, "no target column set");
  }
  return static_cast<std::size_t>(d.target_index());
}

std::size_t require_context_column(const Dataset& d, const std::string& name) {
  const int c = d.column_index(name);
  if (c < 0) {
    fail(ErrorCode::invalid_argument, "no column named \"" + name + "\"");
  }
  if (c == d.target_index()) {
    fail(ErrorCode::invalid_argument, "\"" + name + "\" is the target column");
  }
  return static_cast<std::size_t>(c);
}

}  // namespace

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, int k,
                                                  std::uint64_t seed) {
  if (k < 2) {
    fail(ErrorCode::invalid_argument, "folds must be >= 2");
  }
  if (static_cast<std::size_t>(k) > n) {
    fail(ErrorCode::invalid_argument,
         "more folds than rows (" + std::to_string(k) + " > " + std::to_string(n) +
             ")");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 eng(seed);
  auto bounded = [&eng](std::uint64_t m) {
    // Rejection keeps the draw exactly uniform and the stream portable.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % m;
    std::uint64_t x;
    do {
      x = eng();
    } while (x >= limit);
    return x % m;
  };
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(perm[i], perm[bounded(i + 1)]);
  }
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) {
    folds[i % static_cast<std::size_t>(k)].push_back(perm[i]);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

CvReport cross_validate(const Dataset& d, const RunConfig& config) {
  validate(config);
  const std::size_t tc = require_target(d);
  const std::size_t n = d.n_rows();
  for (std::size_t r = 0; r < n; ++r) {
    if (d.missing(tc, r) || !std::isfinite(d.numeric(tc, r))) {
      fail(ErrorCode::invalid_argument,
           "target missing or non-numeric in row " + std::to_string(r + 1) +
               "; filter rows without a target first");
    }
  }

  const auto folds = kfold_split(n, config.folds, config.seed);
  std::vector<std::size_t> fold_of(n);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    for (std::size_t row : folds[f]) fold_of[row] = f;
  }

  CvReport report;
  report.target = d.column(tc).name;
  report.folds = config.folds;
  report.seed = config.seed;
  report.fold_log_likelihoods.assign(folds.size(), 0.0);
  report.per_point.resize(n);

  run_parallel(static_cast<int>(folds.size()), config.threads, [&](int f) {
    const auto uf = static_cast<std::size_t>(f);
    std::vector<std::size_t> train;
    train.reserve(n - folds[uf].size());
    for (std::size_t r = 0; r < n; ++r) {
      if (fold_of[r] != uf) train.push_back(r);
    }
    const DensityModel model = DensityModel::fit(d.subset_rows(train), config);
    double ll_sum = 0.0;
    for (std::size_t r : folds[uf]) {
      const PredictedDensity pd = model.predict(d, r);
      const double density = model.density_at(pd, d.numeric(tc, r));
      const auto [mean, variance] = moments(pd);
      report.per_point[r] = CvPoint{r, density, mean, variance};
      ll_sum += std::log(density);
    }
    report.fold_log_likelihoods[uf] =
        ll_sum / static_cast<double>(folds[uf].size());
  });

  double ll_sum = 0.0;
  std::size_t below = 0;
  for (const CvPoint& pt : report.per_point) {
    ll_sum += std::log(pt.density_at_actual);
    if (pt.density_at_actual < 1.0) ++below;
  }
  report.mean_log_likelihood = ll_sum / static_cast<double>(n);
  report.fraction_below_one = static_cast<double>(below) / static_cast<double>(n);
  return report;
}

double relevance(const Dataset& d, const std::string& column,
                 const RunConfig& config) {
  const std::size_t tc = require_target(d);
  const std::size_t c = require_context_column(d, column);
  return cross_validate(d.keep_columns({tc, c}), config).mean_log_likelihood;
}

double novelty(const Dataset& d, const std::string& column,
               const RunConfig& config) {
  require_target(d);
  const std::size_t c = require_context_column(d, column);
  if (d.n_cols() < 3) {
    fail(ErrorCode::invalid_argument,
         "novelty needs at least two context columns");
  }
  const double full = cross_validate(d, config).mean_log_likelihood;
  return full - cross_validate(d.without_column(c), config).mean_log_likelihood;
}

std::vector<VariableScore> variable_scores(const Dataset& d,
                                           const RunConfig& config,
                                           bool with_novelty) {
  const std::size_t tc = require_target(d);
  std::vector<VariableScore> scores;
  std::vector<std::size_t> context;
  for (std::size_t c = 0; c < d.n_cols(); ++c) {
    if (c == tc) continue;
    context.push_back(c);
    VariableScore s;
    s.name = d.column(c).name;
    scores.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < context.size(); ++i) {
    scores[i].relevance =
        cross_validate(d.keep_columns({tc, context[i]}), config).mean_log_likelihood;
    scores[i].selected = scores[i].relevance > config.relevance_threshold;
  }
  if (with_novelty && context.size() >= 2) {
    const double full = cross_validate(d, config).mean_log_likelihood;
    for (std::size_t i = 0; i < context.size(); ++i) {
      scores[i].novelty =
          full -
          cross_validate(d.without_column(context[i]), config).mean_log_likelihood;
      scores[i].has_novelty = true;
    }
  }
  return scores;
}

std::string report_text(const CvReport& report) {
  std::ostringstream out;
  out << "hcr_cv_report v1\n";
  out << "target " << report.target << "\n";
  out << "folds " << report.folds << "\n";
  out << "seed " << report.seed << "\n";
  out << "points " << report.per_point.size() << "\n";
  out << "mean_log_likelihood " << canonical_number(report.mean_log_likelihood)
      << "\n";
  out << "fraction_below_one " << canonical_number(report.fraction_below_one)
      << "\n";
  out << "fold_log_likelihoods";
  for (double v : report.fold_log_likelihoods) out << " " << canonical_number(v);
  out << "\n";
  out << "point_id\tdensity_at_actual\tmean\tvariance\n";
  for (const CvPoint& pt : report.per_point) {
    out << pt.point_id << "\t" << canonical_number(pt.density_at_actual) << "\t"
        << canonical_number(pt.mean) << "\t" << canonical_number(pt.variance)
        << "\n";
  }
  return out.str();
}

void write_report(const CvReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    fail(ErrorCode::io, "cannot open \"" + path + "\" for writing");
  }
  out << report_text(report);
  if (!out) {
    fail(ErrorCode::io, "write failed for \"" + path + "\"");
  }
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) {
    fail(ErrorCode::io, "cannot open \"" + p.string() + "\" for writing");
  }
  return out;
}

}  // namespace

void emit_plot_data(const CvReport& report, const Dataset& d,
                    const RunConfig& config, const std::string& out_dir,
                    const std::string& color_column,
                    const std::vector<VariableScore>* scores) {
  namespace fs = std::filesystem;
  const std::size_t tc = require_target(d);
  if (report.per_point.size() != d.n_rows()) {
    fail(ErrorCode::invalid_argument, "report does not match the dataset");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);

  {
    auto out = open_out(fs::path(out_dir) / "sorted_density.tsv");
    std::vector<double> densities;
    densities.reserve(report.per_point.size());
    for (const CvPoint& pt : report.per_point) {
      densities.push_back(pt.density_at_actual);
    }
    std::sort(densities.begin(), densities.end());
    out << "# fraction_below_one\t" << canonical_number(report.fraction_below_one)
        << "\n";
    out << "rank\tdensity_at_actual\n";
    for (std::size_t i = 0; i < densities.size(); ++i) {
      out << i + 1 << "\t" << canonical_number(densities[i]) << "\n";
    }
    if (!out) fail(ErrorCode::io, "write failed in \"" + out_dir + "\"");
  }

  {
    // Normalize actuals with a map over the whole dataset; the per-fold maps
    // are close but not shared, and the plot needs one common scale.
    RankMap map;
    if (config.target_transform == RankMapKind::redshift_analytic) {
      map = RankMap::analytic_redshift();
    } else {
      map = RankMap::fit_numeric(d.numeric_values(tc));
    }
    auto out = open_out(fs::path(out_dir) / "actual_vs_mean.tsv");
    out << "point_id\tactual_normalized\tpredicted_mean\n";
    for (const CvPoint& pt : report.per_point) {
      out << pt.point_id << "\t"
          << canonical_number(map.to_uniform(d.numeric(tc, pt.point_id))) << "\t"
          << canonical_number(pt.mean) << "\n";
    }
    if (!out) fail(ErrorCode::io, "write failed in \"" + out_dir + "\"");
  }

  {
    int color = -1;
    if (!color_column.empty()) {
      color = d.column_index(color_column);
      if (color < 0) {
        fail(ErrorCode::invalid_argument,
             "no column named \"" + color_column + "\"");
      }
    }
    auto out = open_out(fs::path(out_dir) / "mean_vs_sd.tsv");
    out << "point_id\tpredicted_mean\tpredicted_sd";
    if (color >= 0) out << "\t" << color_column;
    out << "\n";
    for (const CvPoint& pt : report.per_point) {
      out << pt.point_id << "\t" << canonical_number(pt.mean) << "\t"
          << canonical_number(std::sqrt(pt.variance));
      if (color >= 0) {
        out << "\t" << d.cell(static_cast<std::size_t>(color), pt.point_id);
      }
      out << "\n";
    }
    if (!out) fail(ErrorCode::io, "write failed in \"" + out_dir + "\"");
  }

  if (scores) {
    auto out = open_out(fs::path(out_dir) / "variable_scores.tsv");
    out << "variable\trelevance\tnovelty\tselected\n";
    for (const VariableScore& s : *scores) {
      out << s.name << "\t" << canonical_number(s.relevance) << "\t";
      if (s.has_novelty) {
        out << canonical_number(s.novelty);
      } else {
        out << "-";
      }
      out << "\t" << (s.selected ? "1" : "0") << "\n";
    }
    if (!out) fail(ErrorCode::io, "write failed in \"" + out_dir + "\"");
  }
}

}  // namespace hcr
