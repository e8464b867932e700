#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/dataset.hpp"
#include "core/density.hpp"

namespace hcr {

struct CvPoint {
  std::size_t point_id = 0;  // row index in the evaluated dataset
  double density_at_actual = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

// Cross-validation outcome. Every row is tested in exactly one fold;
// mean_log_likelihood averages ln(density_at_actual) over all rows.
struct CvReport {
  std::string target;
  int folds = 0;
  std::uint64_t seed = 0;
  std::vector<double> fold_log_likelihoods;
  double mean_log_likelihood = 0.0;
  double fraction_below_one = 0.0;
  std::vector<CvPoint> per_point;  // in row order
};

struct VariableScore {
  std::string name;
  double relevance = 0.0;
  double novelty = 0.0;
  bool has_novelty = false;
  bool selected = false;
};

// Disjoint index lists covering 0..n-1 from a seeded shuffle; sizes differ
// by at most one.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, int k,
                                                  std::uint64_t seed);

// Fits on k-1 folds and scores the held-out fold, for every fold. Rank maps,
// encoder levels' statistics, and standardization come from the training
// folds only. Requires the dataset target set and present in every row.
CvReport cross_validate(const Dataset& d, const RunConfig& config);

// Cross-validated mean log-likelihood using only this column as context.
double relevance(const Dataset& d, const std::string& column,
                 const RunConfig& config);

// Full-model mean log-likelihood minus the same without this column, on the
// same fold split.
double novelty(const Dataset& d, const std::string& column,
               const RunConfig& config);

// Relevance for every context column (and novelty when requested, reusing a
// single full-model run). selected = relevance > config.relevance_threshold.
std::vector<VariableScore> variable_scores(const Dataset& d,
                                           const RunConfig& config,
                                           bool with_novelty);

// Stable line-oriented text form of a report; identical runs produce
// identical bytes.
std::string report_text(const CvReport& report);
void write_report(const CvReport& report, const std::string& path);

// Writes plot-ready tab-separated files into out_dir:
//   sorted_density.tsv    densities at actual values, ascending
//   actual_vs_mean.tsv    normalized actual value vs predicted mean
//   mean_vs_sd.tsv        predicted mean vs standard deviation, with an
//                         optional color-key column copied from the dataset
//   variable_scores.tsv   relevance/novelty per variable (when given)
void emit_plot_data(const CvReport& report, const Dataset& d,
                    const RunConfig& config, const std::string& out_dir,
                    const std::string& color_column = "",
                    const std::vector<VariableScore>* scores = nullptr);

}  // namespace hcr
