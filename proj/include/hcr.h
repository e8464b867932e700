/* C interface to the conditional density estimation library.
 *
 * All functions returning hcr_status set a thread-local message readable
 * through hcr_last_error() on failure. Objects returned through out
 * parameters are owned by the caller and released with the matching _free
 * function. Out parameters are untouched on failure.
 */
#ifndef HCR_H
#define HCR_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hcr_status {
  HCR_OK = 0,
  HCR_ERROR_INVALID_ARGUMENT = 1,
  HCR_ERROR_IO = 2,
  HCR_ERROR_PARSE = 3,
  HCR_ERROR_SCHEMA_MISMATCH = 4,
  HCR_ERROR_UNSUPPORTED = 5,
  HCR_ERROR_INTERNAL = 6
} hcr_status;

typedef struct hcr_dataset hcr_dataset;   /* immutable table of cells */
typedef struct hcr_model hcr_model;       /* fitted density model */
typedef struct hcr_cv_report hcr_cv_report;

/* Plain-old-data run configuration. Fixed-size string fields keep the
 * struct copyable with no ownership questions. */
typedef struct hcr_config {
  char target[256];          /* target column name; required for fitting */
  int degree;                /* basis functions per continuous column (10) */
  int rank;                  /* rotated coefficients to predict (4) */
  double lambda;             /* l1 penalty weight (50) */
  int folds;                 /* cross-validation folds (10) */
  int lattice;               /* density lattice cells (1000) */
  char calibration[32];      /* "softplus_like" or "clip" */
  double threshold;          /* relevance selection threshold (0.01) */
  int pair_products;         /* nonzero adds first-feature pair products */
  uint64_t seed;             /* fold shuffle seed (0) */
  char target_transform[32]; /* "empirical" or "redshift" */
  int uniform_baseline;      /* nonzero skips fitting; predicts density 1 */
  int threads;               /* fold parallelism; 0 = hardware count */
  double softplus_scale;     /* calibration shape (3) */
  double softplus_offset;    /* calibration shape (4) */
  double clip_floor;         /* clip calibration floor (0.1) */
} hcr_config;

void hcr_config_defaults(hcr_config* config);
/* Applies "key = value" lines from path over the current contents. */
hcr_status hcr_config_load_file(hcr_config* config, const char* path);

/* -------- datasets -------- */

hcr_status hcr_dataset_load_csv(const char* path, hcr_dataset** out);
/* overrides_json: {"column name": {"kind": "continuous|discrete|mixed",
 * "missing_marker": "text"}, ...}; either key may be omitted. */
hcr_status hcr_dataset_load_csv_ex(const char* path, const char* overrides_json,
                                   hcr_dataset** out);
/* Concatenates two tables with identical headers and re-infers column
 * kinds; a new discrete column named tag_column records the origin of each
 * row as tag_a or tag_b. */
hcr_status hcr_dataset_merge(const hcr_dataset* a, const hcr_dataset* b,
                             const char* tag_column, const char* tag_a,
                             const char* tag_b, hcr_dataset** out);
hcr_status hcr_dataset_set_target(hcr_dataset* d, const char* column);
/* Rows whose target cell is present, in original order. */
hcr_status hcr_dataset_select_with_target(const hcr_dataset* d, hcr_dataset** out);
hcr_status hcr_dataset_drop_column(const hcr_dataset* d, const char* column,
                                   hcr_dataset** out);
hcr_status hcr_dataset_keep_columns(const hcr_dataset* d,
                                    const char* const* columns, size_t count,
                                    hcr_dataset** out);
size_t hcr_dataset_rows(const hcr_dataset* d);
size_t hcr_dataset_cols(const hcr_dataset* d);
/* -1 when no column has that name. */
int hcr_dataset_column_index(const hcr_dataset* d, const char* name);
/* Borrowed pointers, valid while the dataset lives; NULL when out of range. */
const char* hcr_dataset_column_name(const hcr_dataset* d, size_t index);
const char* hcr_dataset_column_kind(const hcr_dataset* d, size_t index);
/* Raw cell text; NULL when out of range. */
const char* hcr_dataset_cell(const hcr_dataset* d, size_t col, size_t row);
/* Numeric cell value; fails when the cell is missing or not a number. */
hcr_status hcr_dataset_numeric(const hcr_dataset* d, size_t col, size_t row,
                               double* out);
void hcr_dataset_free(hcr_dataset* d);

/* -------- models -------- */

hcr_status hcr_fit(const hcr_dataset* d, const hcr_config* config,
                   hcr_model** out);
hcr_status hcr_model_save(const hcr_model* model, const char* path);
hcr_status hcr_model_load(const char* path, hcr_model** out);
const char* hcr_model_target(const hcr_model* model);
int hcr_model_rank(const hcr_model* model);
int hcr_model_lattice(const hcr_model* model);
void hcr_model_free(hcr_model* model);

/* Calibrated density over the normalized target for one dataset row;
 * lattice must hold hcr_model_lattice(model) doubles. Context columns are
 * matched by name, so d need not be the training table. */
hcr_status hcr_predict_density(const hcr_model* model, const hcr_dataset* d,
                               size_t row, double* lattice);
hcr_status hcr_predict_moments(const hcr_model* model, const hcr_dataset* d,
                               size_t row, double* mean, double* variance);
/* ln of the predicted density in the cell holding the actual target value
 * (given in original units). */
hcr_status hcr_log_likelihood(const hcr_model* model, const hcr_dataset* d,
                              size_t row, double actual, double* out);
/* count inverse-CDF draws of the normalized target; out holds count. */
hcr_status hcr_sample(const hcr_model* model, const hcr_dataset* d, size_t row,
                      int count, uint64_t seed, double* out);
/* Per-cell probability masses in original target units; each array holds
 * hcr_model_lattice(model) doubles. The last upper bound is +inf under the
 * redshift transform. */
hcr_status hcr_original_masses(const hcr_model* model, const hcr_dataset* d,
                               size_t row, double* lower, double* upper,
                               double* mass);

/* -------- evaluation -------- */

hcr_status hcr_cross_validate(const hcr_dataset* d, const hcr_config* config,
                              hcr_cv_report** out);
double hcr_report_mean_log_likelihood(const hcr_cv_report* report);
double hcr_report_fraction_below_one(const hcr_cv_report* report);
int hcr_report_folds(const hcr_cv_report* report);
size_t hcr_report_points(const hcr_cv_report* report);
/* out must hold hcr_report_folds(report) doubles. */
hcr_status hcr_report_fold_log_likelihoods(const hcr_cv_report* report,
                                           double* out);
hcr_status hcr_report_point(const hcr_cv_report* report, size_t index,
                            size_t* point_id, double* density, double* mean,
                            double* variance);
/* Stable text form; free with hcr_string_free. */
hcr_status hcr_report_text(const hcr_cv_report* report, char** out);
hcr_status hcr_report_write(const hcr_cv_report* report, const char* path);
void hcr_report_free(hcr_cv_report* report);

hcr_status hcr_relevance(const hcr_dataset* d, const char* column,
                         const hcr_config* config, double* out);
hcr_status hcr_novelty(const hcr_dataset* d, const char* column,
                       const hcr_config* config, double* out);
/* Tab-separated relevance (and optionally novelty) table over all context
 * columns; free with hcr_string_free. */
hcr_status hcr_variable_scores_text(const hcr_dataset* d,
                                    const hcr_config* config, int with_novelty,
                                    char** out);
/* Writes the plot-ready tables for a finished report into out_dir.
 * color_column may be NULL; include_variable_scores re-runs the per-variable
 * evaluation to add its table. */
hcr_status hcr_emit_plot_data(const hcr_cv_report* report, const hcr_dataset* d,
                              const hcr_config* config, const char* out_dir,
                              const char* color_column,
                              int include_variable_scores);

/* -------- misc -------- */

/* Message from the most recent failing call on this thread; empty string
 * when the last call succeeded. Borrowed pointer. */
const char* hcr_last_error(void);
const char* hcr_version(void);
void hcr_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* HCR_H */
