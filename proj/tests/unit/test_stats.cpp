#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "qcma/errors.hpp"
#include "qcma/rng.hpp"
#include "qcma/stats.hpp"

namespace qcma {
namespace {

TEST(RunningStats, MatchesTwoPass) {
  CounterRng rng(RngSeed{1});
  std::vector<double> xs;
  RunningStats s;
  for (int i = 0; i < 1000; ++i) {
    xs.push_back(1e6 + rng.uniform());
    s.add(xs.back());
  }
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= double(xs.size());
  double var = 0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= double(xs.size() - 1);
  EXPECT_NEAR(s.mean(), mean, 1e-9);
  EXPECT_NEAR(s.variance(), var, 1e-9);
  EXPECT_NEAR(s.stderr_of_mean(), std::sqrt(var / 1000.0), 1e-9);
  EXPECT_EQ(s.count(), 1000u);
  RunningStats one;
  one.add(3.0);
  EXPECT_EQ(one.variance(), 0.0);
}

TEST(Normal, KnownValuesAndRoundTrip) {
  EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-15);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-12);
  EXPECT_NEAR(normal_cdf(-3.0), 0.0013498980316301, 1e-13);
  for (double p : {1e-12, 1e-6, 0.01, 0.02425, 0.3, 0.5, 0.9, 0.999, 1 - 1e-9}) {
    EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-9 * std::max(p, 1e-3)) << p;
  }
  EXPECT_THROW(normal_quantile(0.0), DomainError);
  EXPECT_THROW(normal_quantile(1.0), DomainError);
}

TEST(Normal, Bonferroni) {
  EXPECT_NEAR(bonferroni_z(0.05, 1), 1.959963984540054, 1e-9);
  EXPECT_NEAR(2 * (1 - normal_cdf(bonferroni_z(0.01, 9))), 0.01 / 9, 1e-12);
  EXPECT_THROW(bonferroni_z(0.05, 0), DomainError);
}

TEST(KolmogorovSmirnov, UniformPassesShiftedFails) {
  CounterRng rng(RngSeed{2});
  std::vector<double> u, shifted;
  for (int i = 0; i < 2000; ++i) {
    u.push_back(rng.uniform());
    shifted.push_back(std::pow(u.back(), 1.3));
  }
  EXPECT_GT(ks_uniform(u).p_value, 1e-3);
  EXPECT_LT(ks_uniform(shifted).p_value, 1e-6);
  const std::vector<double> three = {0.1, 0.5, 0.9};
  EXPECT_NEAR(ks_uniform(three).statistic, 0.2333333333333333, 1e-12);
  EXPECT_THROW(ks_uniform(std::vector<double>{}), DomainError);
}

TEST(Wilson, EndpointsSolveTheScoreEquation) {
  for (auto [k, n] : {std::pair<int, int>{5, 10}, {1, 200}, {67, 100}, {999, 1000}}) {
    const double z = 3.0;
    const auto iv = wilson_interval(std::uint64_t(k), std::uint64_t(n), z);
    const double phat = double(k) / n;
    for (double p : {iv.lo, iv.hi}) {
      EXPECT_NEAR(std::abs(phat - p), z * std::sqrt(p * (1 - p) / n), 1e-12) << k << "/" << n;
    }
    EXPECT_LT(iv.lo, phat);
    EXPECT_GT(iv.hi, phat);
  }
  EXPECT_EQ(wilson_interval(0, 10).lo, 0.0);
  EXPECT_EQ(wilson_interval(10, 10).hi, 1.0);
  const auto empty = wilson_interval(0, 0);
  EXPECT_EQ(empty.lo, 0.0);
  EXPECT_EQ(empty.hi, 1.0);
}

}  // namespace
}  // namespace qcma
