#include "bgw/stats.hpp"

#include <algorithm>
#include <cmath>

#include "bgw/errors.hpp"

namespace bgw {

namespace {

double ks_pvalue(double lambda) {
  if (lambda < 0.2) return 1.0;
  double acc = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    acc += (j & 1) ? term : -term;
    if (term < 1e-18) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * acc));
}

double ks_lambda(double n_eff, double d) {
  const double r = std::sqrt(n_eff);
  return d * (r + 0.12 + 0.11 / r);
}

}  // namespace

KsResult two_sample_ks(std::vector<double> a, std::vector<double> b) {
  if (a.size() < 30 || b.size() < 30)
    throw InputError("two_sample_ks: both samples need at least 30 points");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  KsResult r;
  r.statistic = d;
  r.p_value = ks_pvalue(ks_lambda(na * nb / (na + nb), d));
  return r;
}

KsResult ks_vs_cdf(std::vector<double> a,
                   const std::function<double(double)>& cdf) {
  if (a.size() < 30)
    throw InputError("ks_vs_cdf: sample needs at least 30 points");
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  KsResult r;
  r.statistic = d;
  r.p_value = ks_pvalue(ks_lambda(n, d));
  return r;
}

double dkw_band(uint64_t n, double alpha) {
  if (n == 0 || !(alpha > 0.0 && alpha < 1.0))
    throw InputError("dkw_band: need n >= 1 and alpha in (0,1)");
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw InputError("quantile of empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("quantile level outside [0,1]");
  const double h = p * (static_cast<double>(sorted.size()) - 1.0);
  const size_t lo = static_cast<size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double w = h - static_cast<double>(lo);
  return sorted[lo] * (1.0 - w) + sorted[lo + 1] * w;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, 0.5);
}

double median_of_means(const std::vector<double>& xs, size_t blocks) {
  if (blocks == 0 || xs.size() < blocks)
    throw InputError("median_of_means: need at least one point per block");
  std::vector<double> means(blocks, 0.0);
  const size_t per = xs.size() / blocks;
  for (size_t b = 0; b < blocks; ++b) {
    double s = 0.0, comp = 0.0;
    const size_t end = (b + 1 == blocks) ? xs.size() : (b + 1) * per;
    for (size_t i = b * per; i < end; ++i) {
      const double y = xs[i] - comp;
      const double t = s + y;
      comp = (t - s) - y;
      s = t;
    }
    means[b] = s / static_cast<double>(end - b * per);
  }
  return median(std::move(means));
}

TrendTest paired_sign_test_decreasing(const std::vector<double>& earlier,
                                      const std::vector<double>& later) {
  if (earlier.size() != later.size() || earlier.empty())
    throw InputError("sign test: samples must pair up");
  TrendTest t;
  for (size_t i = 0; i < earlier.size(); ++i) {
    if (later[i] < earlier[i]) ++t.favorable;
    else if (later[i] == earlier[i]) ++t.ties;
  }
  t.total = earlier.size();
  const uint64_t effective = t.total - t.ties;
  if (effective == 0) {
    t.p_value = 1.0;
    return t;
  }
  // Normal approximation with continuity correction for
  // P(Bin(effective, 1/2) >= favorable).
  const double m = static_cast<double>(effective);
  const double z = (static_cast<double>(t.favorable) - 0.5 * m - 0.5) /
                   std::sqrt(0.25 * m);
  t.p_value = 1.0 - normal_cdf(z);
  return t;
}

BinomialCi wilson_ci(uint64_t successes, uint64_t trials, double z) {
  if (trials == 0) throw InputError("wilson_ci: no trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace bgw
