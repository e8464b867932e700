#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/rank_map.hpp"

namespace hcr {

enum class EncodingKind { basis, one_hot, mixed, pair_product };

struct FeatureBlock {
  std::string source_column;  // "a*b" for pair products
  EncodingKind encoding = EncodingKind::basis;
  int width = 0;  // basis: m, one_hot: #levels, mixed: m+1, pair_product: 1
  std::vector<std::string> feature_names;
};

// Fitted per-column encoding state.
struct ColumnEncoding {
  ColumnSpec spec;
  std::optional<RankMap> rank;      // continuous/mixed; absent when degenerate
  std::vector<std::string> levels;  // one-hot level keys (discrete)
  bool numeric_levels = false;
  bool special_is_missing = false;  // mixed: special value is missingness
  double special_value = 0.0;       // mixed with a sentinel-value special
};

struct FeatureMatrix {
  Eigen::MatrixXd values;  // n x p
  std::vector<FeatureBlock> blocks;
  int width() const { return static_cast<int>(values.cols()); }
};

// Per-column affine normalization to mean 0, variance 1 (population 1/n
// variance). Constant columns are zeroed with the scale guarded at 1.
struct Standardization {
  std::vector<double> mean;
  std::vector<double> scale;

  void fit(const Eigen::MatrixXd& x);
  void apply_in_place(Eigen::MatrixXd& x) const;
  void apply_in_place(Eigen::Ref<Eigen::RowVectorXd> row) const;
};

// Encodes context variables into numeric features: continuous columns yield
// basis values f_1..f_m of the rank-normalized value, discrete columns one
// indicator per level, mixed columns basis values on the continuous part
// (zero at special rows) plus the special-row indicator. With pair products
// on, f_1(x_j1)*f_1(x_j2) is appended for all j1<j2 over continuous/mixed
// columns. Fitted state is immutable and shareable.
class FeatureEncoder {
public:
  // Fits rank maps and level sets on every non-target column of d.
  void fit(const Dataset& d, int degree, bool pair_products);

  // Raw (unstandardized) features; columns of d are matched by name, so the
  // dataset may carry extra columns or a different order. Unseen discrete
  // levels encode as all-zero indicators.
  FeatureMatrix transform(const Dataset& d) const;
  Eigen::RowVectorXd transform_row(const Dataset& d, std::size_t row) const;

  const std::vector<FeatureBlock>& blocks() const { return blocks_; }
  int width() const { return width_; }
  int degree() const { return degree_; }
  bool pair_products() const { return pair_products_; }
  const std::vector<ColumnEncoding>& column_encodings() const { return columns_; }

  // Serialization support.
  static FeatureEncoder restore(std::vector<ColumnEncoding> columns, int degree,
                                bool pair_products);

private:
  void rebuild_blocks();
  void encode_cell(const ColumnEncoding& enc, const std::string& cell,
                   double* out) const;

  std::vector<ColumnEncoding> columns_;
  std::vector<FeatureBlock> blocks_;
  std::vector<std::pair<int, int>> product_pairs_;  // indices into columns_
  std::vector<int> block_offsets_;                  // per column, into feature row
  int degree_ = 0;
  int width_ = 0;
  bool pair_products_ = false;
};

// Single-column helper used by tests and diagnostics: encodes one fitted
// column over a dataset, returning the block and its feature rows.
std::pair<FeatureBlock, Eigen::MatrixXd> encode_column(const ColumnEncoding& enc,
                                                       const Dataset& d,
                                                       int degree);

// Fits an encoding for one column of d (rank map on non-special values,
// level set from the column spec).
ColumnEncoding fit_column_encoding(const Dataset& d, std::size_t column);

// Rebuilds the derived level and special-value fields from the column spec;
// rank is the already-fitted normalizer for the continuous part, when any.
// Used when restoring a serialized model.
ColumnEncoding make_column_encoding(ColumnSpec spec, std::optional<RankMap> rank);

}  // namespace hcr
