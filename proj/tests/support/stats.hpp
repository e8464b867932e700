#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

// Standard normal CDF.
double normal_cdf(double x);

// Normal(mu, sigma) truncated to [0, 1].
double truncnorm_pdf(double x, double mu, double sigma);
double truncnorm_cdf(double x, double mu, double sigma);

// Kolmogorov-Smirnov distance between the sample and a continuous CDF.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);
double ks_statistic_uniform(std::vector<double> samples);

// Deterministic generator with a platform-stable stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  double normal();  // Box-Muller, one fresh pair per two calls
  std::uint64_t bounded(std::uint64_t m);  // [0, m), rejection sampled
  double truncnorm(double mu, double sigma);  // on [0, 1], by rejection

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace oracle
