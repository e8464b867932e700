#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/errors.hpp"
#include "support/tempdir.hpp"

using hcr::ColumnKind;
using hcr::Dataset;

namespace {

std::vector<std::vector<std::string>> make_rows(std::size_t n,
                                                const std::vector<std::string>& header) {
  // One row builder per column name; keeps the inference cases in one table.
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> row;
    for (const auto& name : header) {
      if (name == "cont") {
        row.push_back(std::to_string(0.1 + 0.37 * static_cast<double>(i)));
      } else if (name == "disc_num") {
        row.push_back(std::to_string(i % 5));
      } else if (name == "disc_text") {
        static const char* levels[3] = {"low", "mid", "high"};
        row.push_back(levels[i % 3]);
      } else if (name == "mixed_missing") {
        row.push_back(i % 20 == 0 ? "" : std::to_string(1.0 + 0.11 * static_cast<double>(i)));
      } else if (name == "mixed_zero") {
        row.push_back(i % 4 == 0 ? "0" : std::to_string(2.0 + 0.13 * static_cast<double>(i)));
      } else {
        row.push_back("x");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TEST_CASE("column kinds are inferred from content") {
  std::vector<std::string> header{"cont", "disc_num", "disc_text",
                                  "mixed_missing", "mixed_zero"};
  auto d = Dataset::from_rows(header, make_rows(120, header));
  REQUIRE(d.n_rows() == 120);
  REQUIRE(d.n_cols() == 5);

  CHECK(d.column(0).kind == ColumnKind::continuous);

  CHECK(d.column(1).kind == ColumnKind::discrete);
  CHECK(d.column(1).numeric_levels);
  REQUIRE(d.column(1).discrete_levels.size() == 5);
  CHECK(d.column(1).discrete_levels.front() == "0");

  CHECK(d.column(2).kind == ColumnKind::discrete);
  CHECK_FALSE(d.column(2).numeric_levels);
  CHECK(d.column(2).discrete_levels ==
        std::vector<std::string>{"high", "low", "mid"});

  CHECK(d.column(3).kind == ColumnKind::mixed);
  CHECK(d.column(3).discrete_levels == std::vector<std::string>{""});

  CHECK(d.column(4).kind == ColumnKind::mixed);
  CHECK(d.column(4).discrete_levels == std::vector<std::string>{"0"});
}

TEST_CASE("distinct-count boundary between discrete and continuous") {
  auto modular = [](std::size_t distinct, std::size_t n) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < n; ++i) {
      rows.push_back({std::to_string(i % distinct)});
    }
    return Dataset::from_rows({"v"}, rows);
  };
  CHECK(modular(20, 200).column(0).kind == ColumnKind::discrete);
  // 21 distinct values, each unique: past the discrete cap, no repeats.
  CHECK(modular(21, 21).column(0).kind == ColumnKind::continuous);
  // 21 distinct values each covering ~5% of rows: the repeat rule fires.
  auto repeated = modular(21, 210);
  CHECK(repeated.column(0).kind == ColumnKind::mixed);
  CHECK(repeated.column(0).discrete_levels == std::vector<std::string>{"0"});
}

TEST_CASE("column overrides beat inference") {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < 60; ++i) {
    rows.push_back({std::to_string(i % 4), i % 2 == 0 ? "-999" : std::to_string(i)});
  }
  std::vector<hcr::ColumnOverride> overrides{
      {"a", ColumnKind::continuous, std::nullopt},
      {"b", std::nullopt, std::string("-999")},
  };
  auto d = Dataset::from_rows({"a", "b"}, rows, overrides);
  CHECK(d.column(0).kind == ColumnKind::continuous);
  CHECK(d.missing(1, 0));
  CHECK_FALSE(d.missing(1, 1));
  // Half the rows are the marker: missing fraction clears the mixed floor.
  CHECK(d.column(1).kind == ColumnKind::mixed);
}

TEST_CASE("csv parsing follows quoting rules") {
  oracle::TempDir dir;
  auto path = dir.file("t.csv");
  oracle::write_file(path,
                     "name,note,v\r\n"
                     "a,\"hello, world\",1\r\n"
                     "b,\"say \"\"hi\"\"\",2\r\n"
                     "c,\"line\nbreak\",3");
  auto d = hcr::load_csv(path);
  REQUIRE(d.n_rows() == 3);
  REQUIRE(d.n_cols() == 3);
  CHECK(d.cell(1, 0) == "hello, world");
  CHECK(d.cell(1, 1) == "say \"hi\"");
  CHECK(d.cell(1, 2) == "line\nbreak");
  CHECK(d.numeric(2, 2) == 3.0);
}

TEST_CASE("csv structural errors are reported") {
  oracle::TempDir dir;
  auto ragged = dir.file("ragged.csv");
  oracle::write_file(ragged, "a,b\n1,2\n3\n");
  CHECK_THROWS_WITH_AS((void)hcr::load_csv(ragged),
                       doctest::Contains("ragged row 3"), hcr::Error);

  auto dup = dir.file("dup.csv");
  oracle::write_file(dup, "a,a\n1,2\n3,4\n");
  CHECK_THROWS_AS((void)hcr::load_csv(dup), hcr::Error);

  auto unterminated = dir.file("bad.csv");
  oracle::write_file(unterminated, "a,b\n\"oops,2\n");
  CHECK_THROWS_AS((void)hcr::load_csv(unterminated), hcr::Error);

  CHECK_THROWS_AS((void)hcr::load_csv(dir.file("absent.csv")), hcr::Error);

  auto tiny = dir.file("tiny.csv");
  oracle::write_file(tiny, "a,b\n1,2\n");
  CHECK_THROWS_AS((void)hcr::load_csv(tiny), hcr::Error);
}

TEST_CASE("number parsing is strict") {
  CHECK(hcr::parse_number(" 3.5 ") == 3.5);
  CHECK(hcr::parse_number("1e3") == 1000.0);
  CHECK(hcr::parse_number("-0.25") == -0.25);
  CHECK_FALSE(hcr::parse_number("abc").has_value());
  CHECK_FALSE(hcr::parse_number("3.5x").has_value());
  CHECK_FALSE(hcr::parse_number("inf").has_value());
  CHECK_FALSE(hcr::parse_number("nan").has_value());
  CHECK_FALSE(hcr::parse_number("").has_value());
}

TEST_CASE("missing cells are empty, NaN spellings, or the column marker") {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < 40; ++i) {
    rows.push_back({i == 0 ? "" : i == 1 ? "NaN" : i == 2 ? "nan" : std::to_string(i)});
  }
  auto d = Dataset::from_rows({"v"}, rows);
  CHECK(d.missing(0, 0));
  CHECK(d.missing(0, 1));
  CHECK(d.missing(0, 2));
  CHECK_FALSE(d.missing(0, 3));
  CHECK(std::isnan(d.numeric(0, 0)));
  CHECK(d.numeric_values(0).size() == 37);
}

TEST_CASE("merge concatenates rows and appends a discrete tag column") {
  std::vector<std::vector<std::string>> rows_a, rows_b;
  for (std::size_t i = 0; i < 38; ++i) {
    rows_a.push_back({std::to_string(0.01 * static_cast<double>(i)), "p"});
  }
  for (std::size_t i = 0; i < 31; ++i) {
    rows_b.push_back({std::to_string(1.0 + 0.01 * static_cast<double>(i)), "q"});
  }
  auto a = Dataset::from_rows({"v", "g"}, rows_a);
  auto b = Dataset::from_rows({"v", "g"}, rows_b);
  a.set_target("v");

  auto m = hcr::merge_datasets(a, b, "source_file", "first", "second");
  REQUIRE(m.n_rows() == 69);
  REQUIRE(m.n_cols() == 3);
  CHECK(m.column(2).name == "source_file");
  CHECK(m.column(2).kind == ColumnKind::discrete);
  CHECK(m.column(2).discrete_levels ==
        std::vector<std::string>{"first", "second"});
  CHECK(m.cell(2, 0) == "first");
  CHECK(m.cell(2, 68) == "second");
  CHECK(m.target_index() == 0);
  // Kinds come from the combined rows: 69 distinct values of v.
  CHECK(m.column(0).kind == ColumnKind::continuous);

  auto c = Dataset::from_rows({"w", "g"}, rows_b);
  CHECK_THROWS_AS((void)hcr::merge_datasets(a, c, "source_file", "x", "y"),
                  hcr::Error);
  CHECK_THROWS_AS((void)hcr::merge_datasets(a, b, "v", "x", "y"), hcr::Error);
}

TEST_CASE("target selection drops only rows whose target is missing") {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < 50; ++i) {
    rows.push_back({i % 7 == 0 ? "" : std::to_string(0.1 * static_cast<double>(i)),
                    std::to_string(i)});
  }
  auto d = Dataset::from_rows({"z", "idx"}, rows);
  d.set_target("z");
  auto kept = hcr::select_rows_with_target(d);
  CHECK(kept.n_rows() == 42);
  CHECK(kept.cell(1, 0) == "1");  // row order preserved
  CHECK(kept.target_index() == 0);

  Dataset no_target = d;
  no_target.set_target("idx");
  CHECK(hcr::select_rows_with_target(no_target).n_rows() == 50);
}

TEST_CASE("column subsetting keeps the target index aligned") {
  std::vector<std::string> header{"cont", "disc_num", "disc_text"};
  auto d = Dataset::from_rows(header, make_rows(40, header));
  d.set_target("disc_num");
  auto dropped = d.without_column(0);
  CHECK(dropped.n_cols() == 2);
  CHECK(dropped.target_index() == 0);
  CHECK(dropped.column(0).name == "disc_num");

  auto kept = d.keep_columns({2, 1});
  CHECK(kept.column(0).name == "disc_text");
  CHECK(kept.target_index() == 1);

  CHECK(d.column_index("disc_text") == 2);
  CHECK(d.column_index("absent") == -1);
  CHECK_THROWS_AS(d.set_target("absent"), hcr::Error);
}

TEST_CASE("subset_rows keeps schema without re-inference") {
  std::vector<std::string> header{"cont", "disc_num"};
  auto d = Dataset::from_rows(header, make_rows(60, header));
  auto s = d.subset_rows({0, 5, 10});
  CHECK(s.n_rows() == 3);
  CHECK(s.column(1).kind == ColumnKind::discrete);
  CHECK(s.column(1).discrete_levels.size() == 5);
  CHECK(s.cell(0, 1) == d.cell(0, 5));
}
