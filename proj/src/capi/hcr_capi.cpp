#include "hcr.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <json.hpp>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/dataset.hpp"
#include "core/density.hpp"
#include "core/errors.hpp"
#include "core/evaluate.hpp"
#include "core/model_io.hpp"

struct hcr_dataset {
  hcr::Dataset impl;
};
struct hcr_model {
  hcr::DensityModel impl;
};
struct hcr_cv_report {
  hcr::CvReport impl;
};

namespace {

thread_local std::string g_last_error;

hcr_status map_code(hcr::ErrorCode code) {
  switch (code) {
    case hcr::ErrorCode::invalid_argument: return HCR_ERROR_INVALID_ARGUMENT;
    case hcr::ErrorCode::io: return HCR_ERROR_IO;
    case hcr::ErrorCode::parse: return HCR_ERROR_PARSE;
    case hcr::ErrorCode::schema_mismatch: return HCR_ERROR_SCHEMA_MISMATCH;
    case hcr::ErrorCode::unsupported: return HCR_ERROR_UNSUPPORTED;
    case hcr::ErrorCode::internal: return HCR_ERROR_INTERNAL;
  }
  return HCR_ERROR_INTERNAL;
}

template <typename Fn>
hcr_status wrap(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return HCR_OK;
  } catch (const hcr::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HCR_ERROR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HCR_ERROR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return HCR_ERROR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) {
    hcr::fail(hcr::ErrorCode::invalid_argument,
              std::string(what) + " must not be null");
  }
}

void copy_field(char* dst, std::size_t cap, const std::string& src,
                const char* what) {
  if (src.size() + 1 > cap) {
    hcr::fail(hcr::ErrorCode::invalid_argument,
              std::string(what) + " longer than " + std::to_string(cap - 1) +
                  " characters");
  }
  std::memcpy(dst, src.c_str(), src.size() + 1);
}

hcr::RunConfig to_run_config(const hcr_config* config) {
  require(config, "config");
  hcr::RunConfig rc;
  rc.target = config->target;
  rc.degree = config->degree;
  rc.rank = config->rank;
  rc.lambda = config->lambda;
  rc.folds = config->folds;
  rc.calibration.lattice_size = config->lattice;
  rc.calibration.kind = hcr::parse_calibration_kind(config->calibration);
  rc.calibration.softplus_scale = config->softplus_scale;
  rc.calibration.softplus_offset = config->softplus_offset;
  rc.calibration.clip_floor = config->clip_floor;
  rc.relevance_threshold = config->threshold;
  rc.pair_products = config->pair_products != 0;
  rc.seed = config->seed;
  const std::string transform = config->target_transform;
  if (transform == "redshift") {
    rc.target_transform = hcr::RankMapKind::redshift_analytic;
  } else if (transform == "empirical") {
    rc.target_transform = hcr::RankMapKind::empirical;
  } else {
    hcr::fail(hcr::ErrorCode::invalid_argument,
              "unknown target_transform \"" + transform + "\"");
  }
  rc.uniform_baseline = config->uniform_baseline != 0;
  rc.threads = config->threads;
  return rc;
}

void from_run_config(const hcr::RunConfig& rc, hcr_config* config) {
  copy_field(config->target, sizeof config->target, rc.target, "target");
  config->degree = rc.degree;
  config->rank = rc.rank;
  config->lambda = rc.lambda;
  config->folds = rc.folds;
  config->lattice = rc.calibration.lattice_size;
  copy_field(config->calibration, sizeof config->calibration,
             hcr::calibration_kind_name(rc.calibration.kind), "calibration");
  config->threshold = rc.relevance_threshold;
  config->pair_products = rc.pair_products ? 1 : 0;
  config->seed = rc.seed;
  copy_field(config->target_transform, sizeof config->target_transform,
             rc.target_transform == hcr::RankMapKind::redshift_analytic
                 ? "redshift"
                 : "empirical",
             "target_transform");
  config->uniform_baseline = rc.uniform_baseline ? 1 : 0;
  config->threads = rc.threads;
  config->softplus_scale = rc.calibration.softplus_scale;
  config->softplus_offset = rc.calibration.softplus_offset;
  config->clip_floor = rc.calibration.clip_floor;
}

// Dataset handles carry the target choice; fitting entry points take the
// target from the config when the handle has none set yet.
hcr::Dataset with_target(const hcr::Dataset& d, const hcr::RunConfig& rc) {
  if (d.target_index() >= 0) return d;
  if (rc.target.empty()) {
    hcr::fail(hcr::ErrorCode::invalid_argument, "config target is empty");
  }
  hcr::Dataset copy = d;
  copy.set_target(rc.target);
  return copy;
}

std::vector<hcr::ColumnOverride> overrides_from_json(const char* text) {
  std::vector<hcr::ColumnOverride> overrides;
  if (!text || !*text) return overrides;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    hcr::fail(hcr::ErrorCode::parse,
              std::string("overrides document is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    hcr::fail(hcr::ErrorCode::parse, "overrides document must be an object");
  }
  for (const auto& [name, entry] : j.items()) {
    hcr::ColumnOverride ov;
    ov.name = name;
    if (!entry.is_object()) {
      hcr::fail(hcr::ErrorCode::parse,
                "override for \"" + name + "\" must be an object");
    }
    if (entry.contains("kind")) {
      const std::string kind = entry.at("kind").get<std::string>();
      if (kind == "continuous") {
        ov.kind = hcr::ColumnKind::continuous;
      } else if (kind == "discrete") {
        ov.kind = hcr::ColumnKind::discrete;
      } else if (kind == "mixed") {
        ov.kind = hcr::ColumnKind::mixed;
      } else {
        hcr::fail(hcr::ErrorCode::parse, "unknown column kind \"" + kind + "\"");
      }
    }
    if (entry.contains("missing_marker")) {
      ov.missing_marker = entry.at("missing_marker").get<std::string>();
    }
    overrides.push_back(std::move(ov));
  }
  return overrides;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

void hcr_config_defaults(hcr_config* config) {
  if (!config) return;
  std::memset(config, 0, sizeof *config);
  from_run_config(hcr::RunConfig{}, config);
}

hcr_status hcr_config_load_file(hcr_config* config, const char* path) {
  return wrap([&] {
    require(config, "config");
    require(path, "path");
    from_run_config(hcr::load_config_file(path, to_run_config(config)), config);
  });
}

hcr_status hcr_dataset_load_csv(const char* path, hcr_dataset** out) {
  return hcr_dataset_load_csv_ex(path, nullptr, out);
}

hcr_status hcr_dataset_load_csv_ex(const char* path, const char* overrides_json,
                                   hcr_dataset** out) {
  return wrap([&] {
    require(path, "path");
    require(out, "out");
    auto d = std::make_unique<hcr_dataset>();
    d->impl = hcr::load_csv(path, overrides_from_json(overrides_json));
    *out = d.release();
  });
}

hcr_status hcr_dataset_merge(const hcr_dataset* a, const hcr_dataset* b,
                             const char* tag_column, const char* tag_a,
                             const char* tag_b, hcr_dataset** out) {
  return wrap([&] {
    require(a, "a");
    require(b, "b");
    require(tag_column, "tag_column");
    require(tag_a, "tag_a");
    require(tag_b, "tag_b");
    require(out, "out");
    auto d = std::make_unique<hcr_dataset>();
    d->impl = hcr::merge_datasets(a->impl, b->impl, tag_column, tag_a, tag_b);
    *out = d.release();
  });
}

hcr_status hcr_dataset_set_target(hcr_dataset* d, const char* column) {
  return wrap([&] {
    require(d, "dataset");
    require(column, "column");
    d->impl.set_target(column);
  });
}

hcr_status hcr_dataset_select_with_target(const hcr_dataset* d,
                                          hcr_dataset** out) {
  return wrap([&] {
    require(d, "dataset");
    require(out, "out");
    auto selected = std::make_unique<hcr_dataset>();
    selected->impl = hcr::select_rows_with_target(d->impl);
    *out = selected.release();
  });
}

hcr_status hcr_dataset_drop_column(const hcr_dataset* d, const char* column,
                                   hcr_dataset** out) {
  return wrap([&] {
    require(d, "dataset");
    require(column, "column");
    require(out, "out");
    const int c = d->impl.column_index(column);
    if (c < 0) {
      hcr::fail(hcr::ErrorCode::invalid_argument,
                "no column named \"" + std::string(column) + "\"");
    }
    auto dropped = std::make_unique<hcr_dataset>();
    dropped->impl = d->impl.without_column(static_cast<std::size_t>(c));
    *out = dropped.release();
  });
}

hcr_status hcr_dataset_keep_columns(const hcr_dataset* d,
                                    const char* const* columns, size_t count,
                                    hcr_dataset** out) {
  return wrap([&] {
    require(d, "dataset");
    require(columns, "columns");
    require(out, "out");
    std::vector<std::size_t> keep;
    keep.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      require(columns[i], "column name");
      const int c = d->impl.column_index(columns[i]);
      if (c < 0) {
        hcr::fail(hcr::ErrorCode::invalid_argument,
                  "no column named \"" + std::string(columns[i]) + "\"");
      }
      keep.push_back(static_cast<std::size_t>(c));
    }
    auto kept = std::make_unique<hcr_dataset>();
    kept->impl = d->impl.keep_columns(keep);
    *out = kept.release();
  });
}

size_t hcr_dataset_rows(const hcr_dataset* d) { return d ? d->impl.n_rows() : 0; }

size_t hcr_dataset_cols(const hcr_dataset* d) { return d ? d->impl.n_cols() : 0; }

int hcr_dataset_column_index(const hcr_dataset* d, const char* name) {
  if (!d || !name) return -1;
  return d->impl.column_index(name);
}

const char* hcr_dataset_column_name(const hcr_dataset* d, size_t index) {
  if (!d || index >= d->impl.n_cols()) return nullptr;
  return d->impl.column(index).name.c_str();
}

const char* hcr_dataset_column_kind(const hcr_dataset* d, size_t index) {
  if (!d || index >= d->impl.n_cols()) return nullptr;
  switch (d->impl.column(index).kind) {
    case hcr::ColumnKind::continuous: return "continuous";
    case hcr::ColumnKind::discrete: return "discrete";
    case hcr::ColumnKind::mixed: return "mixed";
  }
  return nullptr;
}

const char* hcr_dataset_cell(const hcr_dataset* d, size_t col, size_t row) {
  if (!d || col >= d->impl.n_cols() || row >= d->impl.n_rows()) return nullptr;
  return d->impl.cell(col, row).c_str();
}

hcr_status hcr_dataset_numeric(const hcr_dataset* d, size_t col, size_t row,
                               double* out) {
  return wrap([&] {
    require(d, "dataset");
    require(out, "out");
    if (col >= d->impl.n_cols() || row >= d->impl.n_rows()) {
      hcr::fail(hcr::ErrorCode::invalid_argument, "cell index out of range");
    }
    if (d->impl.missing(col, row)) {
      hcr::fail(hcr::ErrorCode::invalid_argument, "cell is missing");
    }
    const double v = d->impl.numeric(col, row);
    if (std::isnan(v)) {
      hcr::fail(hcr::ErrorCode::invalid_argument, "cell is not numeric");
    }
    *out = v;
  });
}

void hcr_dataset_free(hcr_dataset* d) { delete d; }

hcr_status hcr_fit(const hcr_dataset* d, const hcr_config* config,
                   hcr_model** out) {
  return wrap([&] {
    require(d, "dataset");
    require(out, "out");
    const hcr::RunConfig rc = to_run_config(config);
    auto model = std::make_unique<hcr_model>();
    model->impl = hcr::DensityModel::fit(with_target(d->impl, rc), rc);
    *out = model.release();
  });
}

hcr_status hcr_model_save(const hcr_model* model, const char* path) {
  return wrap([&] {
    require(model, "model");
    require(path, "path");
    hcr::save_model(model->impl, path);
  });
}

hcr_status hcr_model_load(const char* path, hcr_model** out) {
  return wrap([&] {
    require(path, "path");
    require(out, "out");
    auto model = std::make_unique<hcr_model>();
    model->impl = hcr::load_model(path);
    *out = model.release();
  });
}

const char* hcr_model_target(const hcr_model* model) {
  return model ? model->impl.target_name.c_str() : nullptr;
}

int hcr_model_rank(const hcr_model* model) {
  return model ? model->impl.rank() : 0;
}

int hcr_model_lattice(const hcr_model* model) {
  return model ? model->impl.calibration.lattice_size : 0;
}

void hcr_model_free(hcr_model* model) { delete model; }

hcr_status hcr_predict_density(const hcr_model* model, const hcr_dataset* d,
                               size_t row, double* lattice) {
  return wrap([&] {
    require(model, "model");
    require(d, "dataset");
    require(lattice, "lattice");
    const hcr::PredictedDensity pd = model->impl.predict(d->impl, row);
    std::memcpy(lattice, pd.lattice.data(),
                static_cast<std::size_t>(pd.lattice.size()) * sizeof(double));
  });
}

hcr_status hcr_predict_moments(const hcr_model* model, const hcr_dataset* d,
                               size_t row, double* mean, double* variance) {
  return wrap([&] {
    require(model, "model");
    require(d, "dataset");
    require(mean, "mean");
    require(variance, "variance");
    const auto [m, v] = hcr::moments(model->impl.predict(d->impl, row));
    *mean = m;
    *variance = v;
  });
}

hcr_status hcr_log_likelihood(const hcr_model* model, const hcr_dataset* d,
                              size_t row, double actual, double* out) {
  return wrap([&] {
    require(model, "model");
    require(d, "dataset");
    require(out, "out");
    *out = model->impl.log_likelihood(d->impl, row, actual);
  });
}

hcr_status hcr_sample(const hcr_model* model, const hcr_dataset* d, size_t row,
                      int count, uint64_t seed, double* out) {
  return wrap([&] {
    require(model, "model");
    require(d, "dataset");
    require(out, "out");
    const auto samples =
        hcr::sample_density(model->impl.predict(d->impl, row), count, seed);
    std::memcpy(out, samples.data(), samples.size() * sizeof(double));
  });
}

hcr_status hcr_original_masses(const hcr_model* model, const hcr_dataset* d,
                               size_t row, double* lower, double* upper,
                               double* mass) {
  return wrap([&] {
    require(model, "model");
    require(d, "dataset");
    require(lower, "lower");
    require(upper, "upper");
    require(mass, "mass");
    const auto cells =
        model->impl.to_original_scale(model->impl.predict(d->impl, row));
    for (std::size_t i = 0; i < cells.size(); ++i) {
      lower[i] = cells[i].lower;
      upper[i] = cells[i].upper;
      mass[i] = cells[i].mass;
    }
  });
}

hcr_status hcr_cross_validate(const hcr_dataset* d, const hcr_config* config,
                              hcr_cv_report** out) {
  return wrap([&] {
    require(d, "dataset");
    require(out, "out");
    const hcr::RunConfig rc = to_run_config(config);
    auto report = std::make_unique<hcr_cv_report>();
    report->impl = hcr::cross_validate(with_target(d->impl, rc), rc);
    *out = report.release();
  });
}

double hcr_report_mean_log_likelihood(const hcr_cv_report* report) {
  return report ? report->impl.mean_log_likelihood : 0.0;
}

double hcr_report_fraction_below_one(const hcr_cv_report* report) {
  return report ? report->impl.fraction_below_one : 0.0;
}

int hcr_report_folds(const hcr_cv_report* report) {
  return report ? report->impl.folds : 0;
}

size_t hcr_report_points(const hcr_cv_report* report) {
  return report ? report->impl.per_point.size() : 0;
}

hcr_status hcr_report_fold_log_likelihoods(const hcr_cv_report* report,
                                           double* out) {
  return wrap([&] {
    require(report, "report");
    require(out, "out");
    const auto& folds = report->impl.fold_log_likelihoods;
    std::memcpy(out, folds.data(), folds.size() * sizeof(double));
  });
}

hcr_status hcr_report_point(const hcr_cv_report* report, size_t index,
                            size_t* point_id, double* density, double* mean,
                            double* variance) {
  return wrap([&] {
    require(report, "report");
    require(point_id, "point_id");
    require(density, "density");
    require(mean, "mean");
    require(variance, "variance");
    if (index >= report->impl.per_point.size()) {
      hcr::fail(hcr::ErrorCode::invalid_argument, "point index out of range");
    }
    const hcr::CvPoint& pt = report->impl.per_point[index];
    *point_id = pt.point_id;
    *density = pt.density_at_actual;
    *mean = pt.mean;
    *variance = pt.variance;
  });
}

hcr_status hcr_report_text(const hcr_cv_report* report, char** out) {
  return wrap([&] {
    require(report, "report");
    require(out, "out");
    *out = dup_string(hcr::report_text(report->impl));
  });
}

hcr_status hcr_report_write(const hcr_cv_report* report, const char* path) {
  return wrap([&] {
    require(report, "report");
    require(path, "path");
    hcr::write_report(report->impl, path);
  });
}

void hcr_report_free(hcr_cv_report* report) { delete report; }

hcr_status hcr_relevance(const hcr_dataset* d, const char* column,
                         const hcr_config* config, double* out) {
  return wrap([&] {
    require(d, "dataset");
    require(column, "column");
    require(out, "out");
    const hcr::RunConfig rc = to_run_config(config);
    *out = hcr::relevance(with_target(d->impl, rc), column, rc);
  });
}

hcr_status hcr_novelty(const hcr_dataset* d, const char* column,
                       const hcr_config* config, double* out) {
  return wrap([&] {
    require(d, "dataset");
    require(column, "column");
    require(out, "out");
    const hcr::RunConfig rc = to_run_config(config);
    *out = hcr::novelty(with_target(d->impl, rc), column, rc);
  });
}

hcr_status hcr_variable_scores_text(const hcr_dataset* d,
                                    const hcr_config* config, int with_novelty,
                                    char** out) {
  return wrap([&] {
    require(d, "dataset");
    require(out, "out");
    const hcr::RunConfig rc = to_run_config(config);
    const auto scores =
        hcr::variable_scores(with_target(d->impl, rc), rc, with_novelty != 0);
    std::string text = "variable\trelevance\tnovelty\tselected\n";
    for (const auto& s : scores) {
      text += s.name;
      text += "\t";
      text += hcr::canonical_number(s.relevance);
      text += "\t";
      text += s.has_novelty ? hcr::canonical_number(s.novelty) : std::string("-");
      text += "\t";
      text += s.selected ? "1" : "0";
      text += "\n";
    }
    *out = dup_string(text);
  });
}

hcr_status hcr_emit_plot_data(const hcr_cv_report* report, const hcr_dataset* d,
                              const hcr_config* config, const char* out_dir,
                              const char* color_column,
                              int include_variable_scores) {
  return wrap([&] {
    require(report, "report");
    require(d, "dataset");
    require(out_dir, "out_dir");
    const hcr::RunConfig rc = to_run_config(config);
    const hcr::Dataset data = with_target(d->impl, rc);
    if (include_variable_scores) {
      const auto scores = hcr::variable_scores(data, rc, true);
      hcr::emit_plot_data(report->impl, data, rc, out_dir,
                          color_column ? color_column : "", &scores);
    } else {
      hcr::emit_plot_data(report->impl, data, rc, out_dir,
                          color_column ? color_column : "", nullptr);
    }
  });
}

const char* hcr_last_error(void) { return g_last_error.c_str(); }

const char* hcr_version(void) { return "0.1.0"; }

void hcr_string_free(char* s) { delete[] s; }

}  // extern "C"
