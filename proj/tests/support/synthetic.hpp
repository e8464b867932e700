#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

// Two-component conditional law: x ~ U(0,1) picks the component, y follows
// a normal truncated to [0,1] around the component center. The amount of
// predictable information is known exactly.
struct BimodalSpec {
  double mu_low = 0.25;
  double mu_high = 0.75;
  double sigma = 0.12;
  std::size_t n = 2000;
  std::uint64_t seed = 7;
  bool independent = false;  // control: the component ignores x
};

struct XySample {
  std::vector<double> x;
  std::vector<double> y;
};

XySample draw_bimodal(const BimodalSpec& spec);
void write_xy_csv(const std::string& path, const XySample& sample);

// Mean over the sample of ln p(y|x) - ln p(y), the exact achievable mean
// log-density for a model of the normalized target.
double bimodal_oracle_ll(const XySample& sample, const BimodalSpec& spec);

// Synthetic catalog shaped like a mid-size survey export: positive
// continuous target plus 21 context columns (correlated continuous columns
// of varying strength, one class column, columns with missing cells, pure
// noise).
struct CatalogSpec {
  std::size_t n = 1767;
  std::uint64_t seed = 20;
  std::string target_name = "Redshift";
  double strength = 1.0;  // scales every context correlation
};

void write_catalog_csv(const std::string& path, const CatalogSpec& spec);

}  // namespace oracle
