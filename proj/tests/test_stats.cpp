#include <doctest.h>

#include <initializer_list>
#include <bgw/rng.hpp>
#include <bgw/stats.hpp>

#include <cmath>
#include <vector>

using namespace bgw;

TEST_CASE("two_sample_ks separates and accepts") {
  Rng rng(1);
  std::vector<double> a, b, c;
  for (int i = 0; i < 3000; ++i) {
    a.push_back(rng.uniform());
    b.push_back(rng.uniform());
    c.push_back(rng.uniform() + 0.5);
  }
  KsResult same = two_sample_ks(a, b);
  CHECK(same.statistic < 0.05);
  CHECK(same.p_value > 0.01);
  KsResult shifted = two_sample_ks(a, c);
  CHECK(shifted.statistic > 0.45);
  CHECK(shifted.p_value < 1e-10);
}

TEST_CASE("ks_vs_cdf on exact uniforms") {
  // An evenly spaced grid has the smallest possible deviation ~ 1/(2n).
  std::vector<double> grid;
  const int n = 1000;
  for (int i = 0; i < n; ++i) grid.push_back((i + 0.5) / n);
  KsResult r = ks_vs_cdf(grid, [](double x) { return x < 0 ? 0.0 : (x > 1 ? 1.0 : x); });
  CHECK(r.statistic == doctest::Approx(0.5 / n).epsilon(1e-6));
  CHECK(r.p_value > 0.999);
}

TEST_CASE("ks handles ties") {
  // Two identical point masses: statistic 0.
  std::vector<double> a(100, 1.0), b(150, 1.0);
  KsResult r = two_sample_ks(a, b);
  CHECK(r.statistic == doctest::Approx(0.0));
  // Disjoint point masses: statistic 1.
  std::vector<double> c(100, 2.0);
  KsResult r2 = two_sample_ks(a, c);
  CHECK(r2.statistic == doctest::Approx(1.0));
}

TEST_CASE("dkw_band reference points") {
  // sqrt(ln(2/alpha)/(2n)).
  CHECK(dkw_band(1000, 0.05) == doctest::Approx(std::sqrt(std::log(40.0) / 2000.0)).epsilon(1e-12));
  CHECK(dkw_band(100, 0.05) > dkw_band(1000, 0.05));
}

TEST_CASE("normal_cdf symmetry and tails") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(normal_cdf(1.959963985) == doctest::Approx(0.975).epsilon(1e-6));
  CHECK(normal_cdf(-8.0) < 1e-14);
  CHECK(normal_cdf(8.0) > 1.0 - 1e-14);
  for (double x : {0.3, 1.1, 2.7})
    CHECK(normal_cdf(x) + normal_cdf(-x) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quantile and median on small vectors") {
  std::vector<double> v = {1, 2, 3, 4};
  CHECK(quantile_sorted(v, 0.0) == 1.0);
  CHECK(quantile_sorted(v, 1.0) == 4.0);
  CHECK(quantile_sorted(v, 0.5) == doctest::Approx(2.5));
  CHECK(median({5.0, 1.0, 3.0}) == 3.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.5));
}

TEST_CASE("median_of_means resists one wild block") {
  std::vector<double> xs(1000, 1.0);
  xs[0] = 1e12;  // one corrupted value
  double m = median_of_means(xs, 20);
  CHECK(m == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("paired_sign_test_decreasing counts and p-values") {
  std::vector<double> e = {5, 5, 5, 5, 5, 5, 5, 5, 5, 5};
  std::vector<double> l = {4, 4, 4, 4, 4, 4, 4, 4, 4, 4};
  TrendTest t = paired_sign_test_decreasing(e, l);
  CHECK(t.favorable == 10);
  CHECK(t.total == 10);
  CHECK(t.ties == 0);
  // Continuity-corrected normal tail for P(Bin(10, 1/2) >= 10).
  double z = (10.0 - 5.0 - 0.5) / std::sqrt(2.5);
  CHECK(t.p_value == doctest::Approx(1.0 - normal_cdf(z)).epsilon(1e-12));
  CHECK(t.p_value < 0.01);
  // A balanced sample is not evidence of decrease.
  TrendTest half = paired_sign_test_decreasing({1, 2, 3, 4}, {0, 3, 2, 5});
  CHECK(half.favorable == 2);
  CHECK(half.p_value > 0.5);
  // Ties are excluded from the effective count; all ties means no evidence.
  TrendTest t2 = paired_sign_test_decreasing({1, 1}, {1, 1});
  CHECK(t2.ties == 2);
  CHECK(t2.total == 2);
  CHECK(t2.p_value == doctest::Approx(1.0));
}

TEST_CASE("wilson_ci brackets the empirical rate") {
  BinomialCi ci = wilson_ci(50, 100);
  CHECK(ci.lo < 0.5);
  CHECK(ci.hi > 0.5);
  CHECK(ci.lo > 0.39);
  CHECK(ci.hi < 0.61);
  BinomialCi zero = wilson_ci(0, 100);
  CHECK(zero.lo == doctest::Approx(0.0));
  CHECK(zero.hi < 0.05);
  BinomialCi all = wilson_ci(100, 100);
  CHECK(all.hi == doctest::Approx(1.0));
  CHECK(all.lo > 0.95);
}
