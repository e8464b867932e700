#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "hcr.h"

namespace {

namespace fs = std::filesystem;

[[noreturn]] void die(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  std::exit(1);
}

void check(hcr_status status) {
  if (status != HCR_OK) die(hcr_last_error());
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void set_field(char* dst, std::size_t cap, const std::string& value,
               const char* what) {
  if (value.size() + 1 > cap) {
    die(std::string(what) + " longer than " + std::to_string(cap - 1) +
        " characters");
  }
  std::memcpy(dst, value.c_str(), value.size() + 1);
}

struct Common {
  std::vector<std::string> inputs;
  std::string config_file;
  std::string out_dir = ".";
  std::string target;
  std::string calibration;
  std::string transform;
  std::string overrides;
  int degree = 0;
  int rank = 0;
  int folds = 0;
  int lattice = 0;
  int threads = 0;
  double lambda = 0.0;
  double threshold = 0.0;
  std::uint64_t seed = 0;
  bool pair_products = false;
  bool uniform_baseline = false;

  CLI::Option* target_opt = nullptr;
  CLI::Option* degree_opt = nullptr;
  CLI::Option* rank_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* folds_opt = nullptr;
  CLI::Option* lattice_opt = nullptr;
  CLI::Option* calibration_opt = nullptr;
  CLI::Option* threshold_opt = nullptr;
  CLI::Option* pair_products_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* transform_opt = nullptr;
  CLI::Option* uniform_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
};

void add_common(CLI::App* cmd, Common& c, bool with_inputs) {
  if (with_inputs) {
    cmd->add_option("csv", c.inputs,
                    "input CSV file(s); two files are concatenated with a "
                    "source_file tag column")
        ->required()
        ->expected(1, 2)
        ->check(CLI::ExistingFile);
  }
  cmd->add_option("--config", c.config_file,
                  "key = value configuration file (flags take precedence)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out_dir, "output directory (default: .)");
  cmd->add_option("--overrides", c.overrides,
                  "JSON column-kind overrides, e.g. "
                  "{\"CLASS\":{\"kind\":\"discrete\"}}");
  c.target_opt = cmd->add_option("--target", c.target, "target column name");
  c.degree_opt = cmd->add_option(
      "--degree", c.degree, "basis functions per continuous column (default 10)");
  c.rank_opt = cmd->add_option(
      "--rank", c.rank, "rotated coefficients to predict (default 4)");
  c.lambda_opt =
      cmd->add_option("--lambda", c.lambda, "l1 penalty weight (default 50)");
  c.folds_opt = cmd->add_option("--folds", c.folds,
                                "cross-validation folds (default 10)");
  c.lattice_opt = cmd->add_option("--lattice", c.lattice,
                                  "density lattice cells (default 1000)");
  c.calibration_opt = cmd->add_option(
      "--calibration", c.calibration,
      "positivity calibration: softplus_like or clip (default softplus_like)");
  c.threshold_opt = cmd->add_option(
      "--threshold", c.threshold,
      "relevance selection threshold (default 0.01)");
  c.pair_products_opt = cmd->add_flag(
      "--pair-products", c.pair_products,
      "add products of the first features of continuous column pairs");
  c.seed_opt = cmd->add_option("--seed", c.seed, "fold shuffle seed (default 0)");
  c.transform_opt = cmd->add_option(
      "--target-transform", c.transform,
      "target normalization: empirical or redshift (default empirical)");
  c.uniform_opt = cmd->add_flag("--uniform-baseline", c.uniform_baseline,
                                "skip fitting and predict the uniform density");
  c.threads_opt = cmd->add_option(
      "--threads", c.threads, "fold parallelism; 0 = hardware count (default)");
}

hcr_config make_config(const Common& c) {
  hcr_config config;
  hcr_config_defaults(&config);
  if (!c.config_file.empty()) {
    check(hcr_config_load_file(&config, c.config_file.c_str()));
  }
  if (c.target_opt->count()) {
    set_field(config.target, sizeof config.target, c.target, "target");
  }
  if (c.degree_opt->count()) config.degree = c.degree;
  if (c.rank_opt->count()) config.rank = c.rank;
  if (c.lambda_opt->count()) config.lambda = c.lambda;
  if (c.folds_opt->count()) config.folds = c.folds;
  if (c.lattice_opt->count()) config.lattice = c.lattice;
  if (c.calibration_opt->count()) {
    set_field(config.calibration, sizeof config.calibration, c.calibration,
              "calibration");
  }
  if (c.threshold_opt->count()) config.threshold = c.threshold;
  if (c.pair_products_opt->count()) config.pair_products = c.pair_products ? 1 : 0;
  if (c.seed_opt->count()) config.seed = c.seed;
  if (c.transform_opt->count()) {
    set_field(config.target_transform, sizeof config.target_transform,
              c.transform, "target_transform");
  }
  if (c.uniform_opt->count()) config.uniform_baseline = c.uniform_baseline ? 1 : 0;
  if (c.threads_opt->count()) config.threads = c.threads;
  return config;
}

hcr_dataset* load_inputs(const Common& c) {
  const char* overrides = c.overrides.empty() ? nullptr : c.overrides.c_str();
  hcr_dataset* first = nullptr;
  check(hcr_dataset_load_csv_ex(c.inputs[0].c_str(), overrides, &first));
  if (c.inputs.size() == 1) return first;

  hcr_dataset* second = nullptr;
  check(hcr_dataset_load_csv_ex(c.inputs[1].c_str(), overrides, &second));
  const std::string tag_a = fs::path(c.inputs[0]).stem().string();
  const std::string tag_b = fs::path(c.inputs[1]).stem().string();
  hcr_dataset* merged = nullptr;
  check(hcr_dataset_merge(first, second, "source_file", tag_a.c_str(),
                          tag_b.c_str(), &merged));
  hcr_dataset_free(first);
  hcr_dataset_free(second);
  std::cout << "merged " << c.inputs.size() << " files into "
            << hcr_dataset_rows(merged) << " rows\n";
  return merged;
}

// Loads, tags the target, and keeps only rows where the target is present.
hcr_dataset* prepare(const Common& c, const hcr_config& config) {
  if (config.target[0] == '\0') {
    die("a target column is required (--target or config file)");
  }
  hcr_dataset* full = load_inputs(c);
  check(hcr_dataset_set_target(full, config.target));
  hcr_dataset* selected = nullptr;
  check(hcr_dataset_select_with_target(full, &selected));
  if (hcr_dataset_rows(selected) != hcr_dataset_rows(full)) {
    std::cout << "selected " << hcr_dataset_rows(selected) << " of "
              << hcr_dataset_rows(full) << " rows with \"" << config.target
              << "\" present\n";
  }
  hcr_dataset_free(full);
  return selected;
}

fs::path ensure_out_dir(const Common& c) {
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  return fs::path(c.out_dir);
}

int run_screen(const Common& c, bool with_novelty) {
  const hcr_config config = make_config(c);
  hcr_dataset* data = prepare(c, config);
  char* table = nullptr;
  check(hcr_variable_scores_text(data, &config, with_novelty ? 1 : 0, &table));
  std::cout << table;
  int selected = 0;
  int total = 0;
  for (const char* p = table; *p;) {
    const char* end = std::strchr(p, '\n');
    if (!end) break;
    if (p != table) {  // skip header
      ++total;
      if (end - p >= 2 && end[-2] == '\t' && end[-1] == '1') ++selected;
    }
    p = end + 1;
  }
  std::cout << "selected " << selected << " of " << total
            << " variables above threshold " << fmt(config.threshold) << "\n";

  const fs::path out = ensure_out_dir(c) / "screen_report.tsv";
  std::ofstream file(out, std::ios::binary);
  if (!file) die("cannot open \"" + out.string() + "\" for writing");
  file << table;
  hcr_string_free(table);
  hcr_dataset_free(data);
  std::cout << "report " << out.string() << "\n";
  return 0;
}

int run_cv(const Common& c) {
  const hcr_config config = make_config(c);
  hcr_dataset* data = prepare(c, config);
  hcr_cv_report* report = nullptr;
  check(hcr_cross_validate(data, &config, &report));
  const fs::path out = ensure_out_dir(c) / "cv_report.tsv";
  check(hcr_report_write(report, out.string().c_str()));
  std::cout << "mean_log_likelihood "
            << fmt(hcr_report_mean_log_likelihood(report)) << "\n";
  std::cout << "fraction_below_one "
            << fmt(hcr_report_fraction_below_one(report)) << "\n";
  std::cout << "report " << out.string() << "\n";
  hcr_report_free(report);
  hcr_dataset_free(data);
  return 0;
}

int run_train(const Common& c) {
  const hcr_config config = make_config(c);
  hcr_dataset* data = prepare(c, config);
  hcr_model* model = nullptr;
  check(hcr_fit(data, &config, &model));
  const fs::path out = ensure_out_dir(c) / "model.json";
  check(hcr_model_save(model, out.string().c_str()));
  std::cout << "trained on " << hcr_dataset_rows(data) << " rows, rank "
            << hcr_model_rank(model) << "\n";
  std::cout << "model " << out.string() << "\n";
  hcr_model_free(model);
  hcr_dataset_free(data);
  return 0;
}

int run_predict(const Common& c, const std::string& model_path, long long row) {
  hcr_model* model = nullptr;
  check(hcr_model_load(model_path.c_str(), &model));
  hcr_dataset* data = load_inputs(c);
  const std::size_t n = hcr_dataset_rows(data);
  const int target = hcr_dataset_column_index(data, hcr_model_target(model));

  const fs::path dir = ensure_out_dir(c);
  const fs::path pred_path = dir / "predictions.tsv";
  std::ofstream pred(pred_path, std::ios::binary);
  if (!pred) die("cannot open \"" + pred_path.string() + "\" for writing");
  pred << "row\tpredicted_mean\tpredicted_sd\tpredicted_variance";
  if (target >= 0) pred << "\tactual\tdensity_at_actual\tlog_likelihood";
  pred << "\n";
  for (std::size_t r = 0; r < n; ++r) {
    double mean = 0.0, variance = 0.0;
    check(hcr_predict_moments(model, data, r, &mean, &variance));
    pred << r << "\t" << fmt(mean) << "\t" << fmt(std::sqrt(variance)) << "\t"
         << fmt(variance);
    if (target >= 0) {
      double actual = 0.0;
      if (hcr_dataset_numeric(data, static_cast<std::size_t>(target), r,
                              &actual) == HCR_OK) {
        double ll = 0.0;
        check(hcr_log_likelihood(model, data, r, actual, &ll));
        pred << "\t" << fmt(actual) << "\t" << fmt(std::exp(ll)) << "\t"
             << fmt(ll);
      } else {
        pred << "\t-\t-\t-";
      }
    }
    pred << "\n";
  }
  std::cout << "predictions " << pred_path.string() << "\n";

  if (row >= 0) {
    if (static_cast<std::size_t>(row) >= n) die("--row out of range");
    const int g_count = hcr_model_lattice(model);
    std::vector<double> lattice(static_cast<std::size_t>(g_count));
    check(hcr_predict_density(model, data, static_cast<std::size_t>(row),
                              lattice.data()));
    const fs::path lat_path = dir / "density_lattice.tsv";
    std::ofstream lat(lat_path, std::ios::binary);
    if (!lat) die("cannot open \"" + lat_path.string() + "\" for writing");
    lat << "cell_center\tdensity\n";
    for (int g = 0; g < g_count; ++g) {
      lat << fmt((g + 0.5) / g_count) << "\t"
          << fmt(lattice[static_cast<std::size_t>(g)]) << "\n";
    }
    std::cout << "density_lattice " << lat_path.string() << "\n";

    std::vector<double> lower(static_cast<std::size_t>(g_count));
    std::vector<double> upper(static_cast<std::size_t>(g_count));
    std::vector<double> mass(static_cast<std::size_t>(g_count));
    check(hcr_original_masses(model, data, static_cast<std::size_t>(row),
                              lower.data(), upper.data(), mass.data()));
    const fs::path mass_path = dir / "original_masses.tsv";
    std::ofstream masses(mass_path, std::ios::binary);
    if (!masses) die("cannot open \"" + mass_path.string() + "\" for writing");
    masses << "lower\tupper\tmass\n";
    for (int g = 0; g < g_count; ++g) {
      const auto i = static_cast<std::size_t>(g);
      masses << fmt(lower[i]) << "\t" << fmt(upper[i]) << "\t" << fmt(mass[i])
             << "\n";
    }
    std::cout << "original_masses " << mass_path.string() << "\n";
  }

  hcr_model_free(model);
  hcr_dataset_free(data);
  return 0;
}

int run_plots(const Common& c, const std::string& color, bool with_scores) {
  const hcr_config config = make_config(c);
  hcr_dataset* data = prepare(c, config);
  hcr_cv_report* report = nullptr;
  check(hcr_cross_validate(data, &config, &report));
  const fs::path dir = ensure_out_dir(c);
  check(hcr_emit_plot_data(report, data, &config, dir.string().c_str(),
                           color.empty() ? nullptr : color.c_str(),
                           with_scores ? 1 : 0));
  std::cout << "mean_log_likelihood "
            << fmt(hcr_report_mean_log_likelihood(report)) << "\n";
  std::cout << "plot data in " << dir.string() << "\n";
  hcr_report_free(report);
  hcr_dataset_free(data);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional density estimation for tabular data"};
  app.set_version_flag("--version", hcr_version());
  app.require_subcommand(1);

  Common screen_c, cv_c, train_c, predict_c, plots_c;
  bool with_novelty = false;
  std::string model_path, color;
  long long row = -1;
  bool with_scores = false;

  CLI::App* screen = app.add_subcommand(
      "screen", "rank variables by single-variable predictive power");
  add_common(screen, screen_c, true);
  screen->add_flag("--novelty", with_novelty,
                   "also compute each variable's unique contribution");

  CLI::App* cv = app.add_subcommand(
      "cv", "cross-validated log-likelihood evaluation");
  add_common(cv, cv_c, true);

  CLI::App* train =
      app.add_subcommand("train", "fit a density model and save it");
  add_common(train, train_c, true);

  CLI::App* predict = app.add_subcommand(
      "predict", "per-row densities and moments from a saved model");
  add_common(predict, predict_c, true);
  predict->add_option("--model", model_path, "saved model document")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option(
      "--row", row,
      "also write the full lattice and original-scale masses for this row");

  CLI::App* plots =
      app.add_subcommand("plots", "emit plot-ready cross-validation tables");
  add_common(plots, plots_c, true);
  plots->add_option("--color", color,
                    "dataset column copied into mean_vs_sd.tsv as a color key");
  plots->add_flag("--scores", with_scores,
                  "also emit per-variable relevance/novelty scores");

  CLI11_PARSE(app, argc, argv);

  if (screen->parsed()) return run_screen(screen_c, with_novelty);
  if (cv->parsed()) return run_cv(cv_c);
  if (train->parsed()) return run_train(train_c);
  if (predict->parsed()) return run_predict(predict_c, model_path, row);
  if (plots->parsed()) return run_plots(plots_c, color, with_scores);
  return 1;
}
