#include "core/features.hpp"

#include <cmath>

#include "core/basis.hpp"
#include "core/errors.hpp"

namespace hcr {

void Standardization::fit(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) {
    fail(ErrorCode::invalid_argument, "standardization needs n >= 2");
  }
  const Eigen::Index p = x.cols();
  mean.assign(static_cast<std::size_t>(p), 0.0);
  scale.assign(static_cast<std::size_t>(p), 1.0);
  const double n = static_cast<double>(x.rows());
  for (Eigen::Index c = 0; c < p; ++c) {
    const double lo = x.col(c).minCoeff();
    const double hi = x.col(c).maxCoeff();
    if (lo == hi) {
      // Exactly constant: subtracting the value itself zeroes the column.
      mean[static_cast<std::size_t>(c)] = lo;
      scale[static_cast<std::size_t>(c)] = 1.0;
      continue;
    }
    const double mu = x.col(c).mean();
    const double var = (x.col(c).array() - mu).square().sum() / n;
    mean[static_cast<std::size_t>(c)] = mu;
    scale[static_cast<std::size_t>(c)] = var > 1e-30 ? std::sqrt(var) : 1.0;
  }
}

void Standardization::apply_in_place(Eigen::MatrixXd& x) const {
  if (static_cast<std::size_t>(x.cols()) != mean.size()) {
    fail(ErrorCode::invalid_argument, "standardization width mismatch");
  }
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const std::size_t j = static_cast<std::size_t>(c);
    x.col(c) = (x.col(c).array() - mean[j]) / scale[j];
  }
}

void Standardization::apply_in_place(Eigen::Ref<Eigen::RowVectorXd> row) const {
  if (static_cast<std::size_t>(row.cols()) != mean.size()) {
    fail(ErrorCode::invalid_argument, "standardization width mismatch");
  }
  for (Eigen::Index c = 0; c < row.cols(); ++c) {
    const std::size_t j = static_cast<std::size_t>(c);
    row(c) = (row(c) - mean[j]) / scale[j];
  }
}

namespace {

std::string display_level(const std::string& key) {
  return key.empty() ? "(missing)" : key;
}

bool is_context_block(const ColumnEncoding& enc) {
  return enc.spec.kind == ColumnKind::continuous || enc.spec.kind == ColumnKind::mixed;
}

int column_width(const ColumnEncoding& enc, int degree) {
  switch (enc.spec.kind) {
    case ColumnKind::continuous: return degree;
    case ColumnKind::discrete: return static_cast<int>(enc.levels.size());
    case ColumnKind::mixed: return degree + 1;
  }
  return 0;
}

bool cell_is_missing(const ColumnEncoding& enc, const std::string& cell) {
  if (cell.empty()) return true;
  if (cell.size() == 3 && (cell[0] == 'n' || cell[0] == 'N') &&
      (cell[1] == 'a' || cell[1] == 'A') && (cell[2] == 'n' || cell[2] == 'N')) {
    return true;
  }
  return enc.spec.missing_marker && cell == *enc.spec.missing_marker;
}

}  // namespace

ColumnEncoding make_column_encoding(ColumnSpec spec, std::optional<RankMap> rank) {
  ColumnEncoding enc;
  enc.spec = std::move(spec);
  enc.rank = std::move(rank);
  switch (enc.spec.kind) {
    case ColumnKind::continuous:
      break;
    case ColumnKind::discrete:
      enc.levels = enc.spec.discrete_levels;
      enc.numeric_levels = enc.spec.numeric_levels;
      break;
    case ColumnKind::mixed: {
      if (enc.spec.discrete_levels.empty()) {
        fail(ErrorCode::internal, "mixed column \"" + enc.spec.name +
                                      "\" without a special value");
      }
      const std::string& special = enc.spec.discrete_levels.front();
      if (special.empty()) {
        enc.special_is_missing = true;
      } else {
        auto v = parse_number(special);
        if (!v) {
          fail(ErrorCode::internal, "mixed column \"" + enc.spec.name +
                                        "\" with non-numeric special value");
        }
        enc.special_value = *v;
      }
      break;
    }
  }
  return enc;
}

ColumnEncoding fit_column_encoding(const Dataset& d, std::size_t column) {
  ColumnEncoding enc = make_column_encoding(d.column(column), std::nullopt);
  switch (enc.spec.kind) {
    case ColumnKind::continuous: {
      auto values = d.numeric_values(column);
      if (!values.empty()) enc.rank = RankMap::fit_numeric(std::move(values));
      break;
    }
    case ColumnKind::discrete:
      break;
    case ColumnKind::mixed: {
      std::vector<double> values;
      for (std::size_t r = 0; r < d.n_rows(); ++r) {
        if (d.missing(column, r)) continue;
        const double v = d.numeric(column, r);
        if (std::isnan(v)) continue;
        if (!enc.special_is_missing && v == enc.special_value) continue;
        values.push_back(v);
      }
      if (!values.empty()) enc.rank = RankMap::fit_numeric(std::move(values));
      break;
    }
  }
  return enc;
}

void FeatureEncoder::rebuild_blocks() {
  blocks_.clear();
  block_offsets_.clear();
  product_pairs_.clear();
  width_ = 0;
  for (const auto& enc : columns_) {
    FeatureBlock b;
    b.source_column = enc.spec.name;
    block_offsets_.push_back(width_);
    switch (enc.spec.kind) {
      case ColumnKind::continuous:
        b.encoding = EncodingKind::basis;
        for (int j = 1; j <= degree_; ++j) {
          b.feature_names.push_back(enc.spec.name + ":f" + std::to_string(j));
        }
        break;
      case ColumnKind::discrete:
        b.encoding = EncodingKind::one_hot;
        for (const auto& level : enc.levels) {
          b.feature_names.push_back(enc.spec.name + "=" + display_level(level));
        }
        break;
      case ColumnKind::mixed:
        b.encoding = EncodingKind::mixed;
        for (int j = 1; j <= degree_; ++j) {
          b.feature_names.push_back(enc.spec.name + ":f" + std::to_string(j));
        }
        b.feature_names.push_back(enc.spec.name + "=" +
                                  display_level(enc.spec.discrete_levels.empty()
                                                    ? ""
                                                    : enc.spec.discrete_levels.front()));
        break;
    }
    b.width = column_width(enc, degree_);
    width_ += b.width;
    blocks_.push_back(std::move(b));
  }
  if (pair_products_) {
    const int n = static_cast<int>(columns_.size());
    for (int i = 0; i < n; ++i) {
      if (!is_context_block(columns_[static_cast<std::size_t>(i)])) continue;
      for (int j = i + 1; j < n; ++j) {
        if (!is_context_block(columns_[static_cast<std::size_t>(j)])) continue;
        product_pairs_.emplace_back(i, j);
        FeatureBlock b;
        const std::string& na = columns_[static_cast<std::size_t>(i)].spec.name;
        const std::string& nb = columns_[static_cast<std::size_t>(j)].spec.name;
        b.source_column = na + "*" + nb;
        b.encoding = EncodingKind::pair_product;
        b.width = 1;
        b.feature_names.push_back(na + ":f1*" + nb + ":f1");
        width_ += 1;
        blocks_.push_back(std::move(b));
      }
    }
  }
}

void FeatureEncoder::fit(const Dataset& d, int degree, bool pair_products) {
  if (degree < 1) {
    fail(ErrorCode::invalid_argument, "feature degree must be >= 1");
  }
  degree_ = degree;
  pair_products_ = pair_products;
  columns_.clear();
  for (std::size_t c = 0; c < d.n_cols(); ++c) {
    if (d.target_index() >= 0 && c == static_cast<std::size_t>(d.target_index())) {
      continue;
    }
    columns_.push_back(fit_column_encoding(d, c));
  }
  if (columns_.empty()) {
    fail(ErrorCode::invalid_argument, "no context columns to encode");
  }
  rebuild_blocks();
}

FeatureEncoder FeatureEncoder::restore(std::vector<ColumnEncoding> columns,
                                       int degree, bool pair_products) {
  FeatureEncoder e;
  e.columns_ = std::move(columns);
  e.degree_ = degree;
  e.pair_products_ = pair_products;
  e.rebuild_blocks();
  return e;
}

void FeatureEncoder::encode_cell(const ColumnEncoding& enc, const std::string& cell,
                                 double* out) const {
  const int w = column_width(enc, degree_);
  std::fill(out, out + w, 0.0);
  const bool missing = cell_is_missing(enc, cell);
  switch (enc.spec.kind) {
    case ColumnKind::continuous: {
      if (missing || !enc.rank) return;
      auto v = parse_number(cell);
      if (!v) return;
      eval_basis(BasisSpec{degree_}, enc.rank->to_uniform(*v), out);
      return;
    }
    case ColumnKind::discrete: {
      std::string key;
      if (missing) {
        key = "";
      } else if (enc.numeric_levels) {
        auto v = parse_number(cell);
        if (!v) return;  // unseen: all-zero indicators
        key = canonical_number(*v);
      } else {
        key = cell;
      }
      for (std::size_t i = 0; i < enc.levels.size(); ++i) {
        if (enc.levels[i] == key) {
          out[i] = 1.0;
          return;
        }
      }
      return;  // unseen level
    }
    case ColumnKind::mixed: {
      if (enc.special_is_missing && missing) {
        out[degree_] = 1.0;
        return;
      }
      if (missing) return;
      auto v = parse_number(cell);
      if (!v) return;
      if (!enc.special_is_missing && *v == enc.special_value) {
        out[degree_] = 1.0;
        return;
      }
      if (enc.rank) eval_basis(BasisSpec{degree_}, enc.rank->to_uniform(*v), out);
      return;
    }
  }
}

FeatureMatrix FeatureEncoder::transform(const Dataset& d) const {
  FeatureMatrix fm;
  fm.blocks = blocks_;
  fm.values.resize(static_cast<Eigen::Index>(d.n_rows()), width_);
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    fm.values.row(static_cast<Eigen::Index>(r)) = transform_row(d, r);
  }
  return fm;
}

Eigen::RowVectorXd FeatureEncoder::transform_row(const Dataset& d,
                                                 std::size_t row) const {
  if (row >= d.n_rows()) {
    fail(ErrorCode::invalid_argument, "row index out of range");
  }
  Eigen::RowVectorXd out(width_);
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const ColumnEncoding& enc = columns_[i];
    const int c = d.column_index(enc.spec.name);
    if (c < 0) {
      fail(ErrorCode::schema_mismatch, "dataset lacks column \"" +
                                           enc.spec.name + "\"");
    }
    encode_cell(enc, d.cell(static_cast<std::size_t>(c), row),
                out.data() + block_offsets_[i]);
  }
  int slot = 0;
  for (const auto& [i, j] : product_pairs_) {
    const double f1a = out(block_offsets_[static_cast<std::size_t>(i)]);
    const double f1b = out(block_offsets_[static_cast<std::size_t>(j)]);
    out(width_ - static_cast<int>(product_pairs_.size()) + slot) = f1a * f1b;
    ++slot;
  }
  return out;
}

std::pair<FeatureBlock, Eigen::MatrixXd> encode_column(const ColumnEncoding& enc,
                                                       const Dataset& d,
                                                       int degree) {
  FeatureEncoder e = FeatureEncoder::restore({enc}, degree, false);
  FeatureMatrix fm = e.transform(d);
  return {fm.blocks.front(), std::move(fm.values)};
}

}  // namespace hcr
