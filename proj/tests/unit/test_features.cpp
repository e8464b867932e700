#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "core/basis.hpp"
#include "core/dataset.hpp"
#include "core/errors.hpp"
#include "core/features.hpp"

using hcr::Dataset;
using hcr::EncodingKind;
using hcr::FeatureEncoder;

namespace {

Dataset tiny_table() {
  // 30 rows: continuous "x", discrete "g", target "y", mixed "m" (empty cell
  // on every 10th row keeps the 1% floor cleared).
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < 30; ++i) {
    static const char* levels[3] = {"red", "green", "blue"};
    rows.push_back({std::to_string(0.05 + 0.31 * static_cast<double>(i)),
                    levels[i % 3],
                    std::to_string(0.2 + 0.17 * static_cast<double>(i)),
                    i % 10 == 0 ? "" : std::to_string(3.0 + 0.21 * static_cast<double>(i))});
  }
  auto d = Dataset::from_rows({"x", "g", "y", "m"}, rows);
  d.set_target("y");
  return d;
}

}  // namespace

TEST_CASE("encoder lays out blocks per column kind") {
  auto d = tiny_table();
  FeatureEncoder enc;
  enc.fit(d, 3, false);

  REQUIRE(enc.blocks().size() == 3);
  CHECK(enc.blocks()[0].source_column == "x");
  CHECK(enc.blocks()[0].encoding == EncodingKind::basis);
  CHECK(enc.blocks()[0].width == 3);
  CHECK(enc.blocks()[0].feature_names ==
        std::vector<std::string>{"x:f1", "x:f2", "x:f3"});

  CHECK(enc.blocks()[1].source_column == "g");
  CHECK(enc.blocks()[1].encoding == EncodingKind::one_hot);
  CHECK(enc.blocks()[1].width == 3);
  CHECK(enc.blocks()[1].feature_names ==
        std::vector<std::string>{"g=blue", "g=green", "g=red"});

  CHECK(enc.blocks()[2].source_column == "m");
  CHECK(enc.blocks()[2].encoding == EncodingKind::mixed);
  CHECK(enc.blocks()[2].width == 4);
  CHECK(enc.blocks()[2].feature_names.back() == "m=(missing)");

  CHECK(enc.width() == 10);
}

TEST_CASE("continuous cells encode as basis values of the rank position") {
  auto d = tiny_table();
  FeatureEncoder enc;
  enc.fit(d, 3, false);
  auto fm = enc.transform(d);
  REQUIRE(fm.values.rows() == 30);
  REQUIRE(fm.values.cols() == 10);

  const auto& ce = enc.column_encodings()[0];
  REQUIRE(ce.rank.has_value());
  for (std::size_t r = 0; r < 5; ++r) {
    double u = ce.rank->to_uniform(d.numeric(0, r));
    auto f = hcr::eval_basis(hcr::BasisSpec{3}, u);
    for (int j = 0; j < 3; ++j) {
      CHECK(fm.values(static_cast<int>(r), j) == doctest::Approx(f[static_cast<std::size_t>(j)]));
    }
  }
}

TEST_CASE("discrete cells set exactly one indicator") {
  auto d = tiny_table();
  FeatureEncoder enc;
  enc.fit(d, 3, false);
  auto fm = enc.transform(d);
  // Columns 3..5 are g=blue, g=green, g=red.
  for (int r = 0; r < 30; ++r) {
    double sum = fm.values(r, 3) + fm.values(r, 4) + fm.values(r, 5);
    CHECK(sum == 1.0);
  }
  CHECK(fm.values(0, 5) == 1.0);  // row 0 is "red"
  CHECK(fm.values(1, 4) == 1.0);  // row 1 is "green"
  CHECK(fm.values(2, 3) == 1.0);  // row 2 is "blue"
}

TEST_CASE("mixed cells split into basis part and special indicator") {
  auto d = tiny_table();
  FeatureEncoder enc;
  enc.fit(d, 3, false);
  auto fm = enc.transform(d);
  // Row 0 has the empty mixed cell: basis part zero, indicator one.
  CHECK(fm.values(0, 6) == 0.0);
  CHECK(fm.values(0, 7) == 0.0);
  CHECK(fm.values(0, 8) == 0.0);
  CHECK(fm.values(0, 9) == 1.0);
  // Row 1 is a regular value: indicator zero, basis part from its rank.
  CHECK(fm.values(1, 9) == 0.0);
  const auto& ce = enc.column_encodings()[2];
  REQUIRE(ce.rank.has_value());
  CHECK(ce.special_is_missing);
  double u = ce.rank->to_uniform(d.numeric(3, 1));
  auto f = hcr::eval_basis(hcr::BasisSpec{3}, u);
  CHECK(fm.values(1, 6) == doctest::Approx(f[0]));
  // The rank map saw only the 27 non-special values.
  CHECK(ce.rank->fitted_count() == 27);
}

TEST_CASE("unseen discrete levels encode as all zeros") {
  auto d = tiny_table();
  FeatureEncoder enc;
  enc.fit(d, 3, false);

  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < 2; ++i) {
    rows.push_back({"1.0", "violet", "0.5", "4.0"});
  }
  auto fresh = Dataset::from_rows({"x", "g", "y", "m"}, rows);
  auto row = enc.transform_row(fresh, 0);
  CHECK(row[3] == 0.0);
  CHECK(row[4] == 0.0);
  CHECK(row[5] == 0.0);
}

TEST_CASE("rows are matched by column name, not position") {
  auto d = tiny_table();
  FeatureEncoder enc;
  enc.fit(d, 3, false);

  std::vector<std::vector<std::string>> rows{{"green", "0.67", "5.2", "extra"},
                                             {"red", "1.24", "4.1", "extra"}};
  auto shuffled = Dataset::from_rows({"g", "x", "m", "unrelated"}, rows);
  auto row = enc.transform_row(shuffled, 0);
  REQUIRE(row.size() == 10);
  CHECK(row[4] == 1.0);  // g=green

  std::vector<std::vector<std::string>> missing_col{{"0.67", "5.2"}, {"1.24", "4.1"}};
  auto incomplete = Dataset::from_rows({"x", "m"}, missing_col);
  CHECK_THROWS_AS((void)enc.transform_row(incomplete, 0), hcr::Error);
}

TEST_CASE("pair products multiply first basis features of numeric columns") {
  auto d = tiny_table();
  FeatureEncoder enc;
  enc.fit(d, 3, true);
  // Numeric-part columns are x and m: one product block.
  REQUIRE(enc.blocks().size() == 4);
  CHECK(enc.blocks()[3].encoding == EncodingKind::pair_product);
  CHECK(enc.blocks()[3].width == 1);
  CHECK(enc.blocks()[3].feature_names ==
        std::vector<std::string>{"x:f1*m:f1"});
  CHECK(enc.width() == 11);

  auto fm = enc.transform(d);
  for (int r = 0; r < 30; ++r) {
    CHECK(fm.values(r, 10) ==
          doctest::Approx(fm.values(r, 0) * fm.values(r, 6)));
  }
}

TEST_CASE("standardization centers and scales with population variance") {
  Eigen::MatrixXd x(3, 2);
  x << 1.0, 5.0, 2.0, 5.0, 3.0, 5.0;
  hcr::Standardization st;
  st.fit(x);
  CHECK(st.mean[0] == doctest::Approx(2.0));
  CHECK(st.mean[1] == doctest::Approx(5.0));
  CHECK(st.scale[1] == 1.0);  // constant column guard

  Eigen::MatrixXd z = x;
  st.apply_in_place(z);
  double s = std::sqrt(2.0 / 3.0);
  CHECK(z(0, 0) == doctest::Approx(-1.0 / s));
  CHECK(z(1, 0) == doctest::Approx(0.0).epsilon(0).margin(1e-15));
  CHECK(z(2, 0) == doctest::Approx(1.0 / s));
  // Constant columns become exact zeros.
  CHECK(z(0, 1) == 0.0);
  CHECK(z(1, 1) == 0.0);
  CHECK(z(2, 1) == 0.0);

  Eigen::RowVectorXd row(2);
  row << 3.0, 7.0;
  st.apply_in_place(row);
  CHECK(row[0] == doctest::Approx(1.0 / s));
  CHECK(row[1] == doctest::Approx(2.0));
}

TEST_CASE("encoder state survives restore") {
  auto d = tiny_table();
  FeatureEncoder enc;
  enc.fit(d, 3, true);
  auto restored = FeatureEncoder::restore(enc.column_encodings(), enc.degree(),
                                          enc.pair_products());
  auto a = enc.transform(d);
  auto b = restored.transform(d);
  CHECK(a.values == b.values);
  CHECK(restored.width() == enc.width());
}

TEST_CASE("single column encoding helper matches the full transform") {
  auto d = tiny_table();
  auto ce = hcr::fit_column_encoding(d, 0);
  auto [block, values] = hcr::encode_column(ce, d, 3);
  CHECK(block.source_column == "x");
  CHECK(values.rows() == 30);
  CHECK(values.cols() == 3);

  FeatureEncoder enc;
  enc.fit(d, 3, false);
  auto fm = enc.transform(d);
  CHECK(values == fm.values.leftCols(3));
}
