#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace bgw {

struct KsResult {
  double statistic = 0;
  double p_value = 1;
};

// Two-sample Kolmogorov-Smirnov with tie handling; both sides need >= 30
// points. p-value from the asymptotic Kolmogorov series.
KsResult two_sample_ks(std::vector<double> a, std::vector<double> b);

// One-sample test of a against a continuous CDF; needs >= 30 points.
KsResult ks_vs_cdf(std::vector<double> a,
                   const std::function<double(double)>& cdf);

// Dvoretzky-Kiefer-Wolfowitz band half-width: sup |F_hat - F| exceeds this
// with probability at most alpha.
double dkw_band(uint64_t n, double alpha);

double normal_cdf(double x);

// Linear-interpolation quantile of an ascending-sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double p);
double median(std::vector<double> v);

// Mean estimate robust to heavy tails: split into blocks, take the median
// of the block means.
double median_of_means(const std::vector<double>& xs, size_t blocks);

// Paired one-sided sign test that `later` is stochastically below
// `earlier`: counts pairs with later < earlier, p-value = chance of seeing
// at least that many under a fair coin (ties dropped).
struct TrendTest {
  uint64_t favorable = 0;
  uint64_t ties = 0;
  uint64_t total = 0;
  double p_value = 1;
};
TrendTest paired_sign_test_decreasing(const std::vector<double>& earlier,
                                      const std::vector<double>& later);

// Wilson score interval for a binomial proportion.
struct BinomialCi {
  double lo = 0, hi = 1;
};
BinomialCi wilson_ci(uint64_t successes, uint64_t trials, double z = 1.96);

}  // namespace bgw
