#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace qcma {

/// Welford accumulator.
class RunningStats {
 public:
  void add(double x);
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance (0 for fewer than two samples).
  double variance() const;
  double stderr_of_mean() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

double normal_cdf(double z);
/// Inverse of normal_cdf for p in (0, 1).
double normal_quantile(double p);

/// Two-sided z threshold controlling the family-wise error at `alpha` over
/// `comparisons` tests.
double bonferroni_z(double alpha, std::size_t comparisons);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against Uniform[0, 1), asymptotic p-value.
KsResult ks_uniform(std::span<const double> samples);

/// Wilson score interval for a binomial proportion.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 3.0);

}  // namespace qcma
