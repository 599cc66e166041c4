#include "bgw/tail_series.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace bgw {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Direct summation below this index, Euler-Maclaurin closure above.
constexpr uint64_t kSwitch = 4096;

// Kahan-compensated descending sum of f(k), k = m..hi (inclusive).
template <class F>
double sum_desc(F f, uint64_t m, uint64_t hi) {
  double s = 0.0, comp = 0.0;
  for (uint64_t k = hi; k >= m; --k) {
    const double y = f(k) - comp;
    const double t = s + y;
    comp = (t - s) - y;
    s = t;
    if (k == m) break;
  }
  return s;
}

}  // namespace

double exp_int_e1(double x) {
  assert(x > 0.0);
  if (x <= 1.0) {
    // E1(x) = -gamma - ln x + sum_{k>=1} (-1)^(k+1) x^k / (k k!)
    double sum = 0.0, term = 1.0;
    for (int k = 1; k <= 40; ++k) {
      term *= -x / k;
      const double add = -term / k;
      sum += add;
      if (std::fabs(add) < 1e-18 * (std::fabs(sum) + 1.0)) break;
    }
    return -kEulerGamma - std::log(x) + sum;
  }
  // Modified Lentz on the continued fraction
  // E1(x) = e^(-x) / (x + 1 - 1/(x + 3 - 4/(x + 5 - 9/(x + 7 - ...))))
  const double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 200; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double del = c * d;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x);
}

double integral_inv_x2_log2(double x) {
  assert(x > 1.0);
  const double L = std::log(x);
  return 1.0 / (x * L) - exp_int_e1(L);
}

double tail_sum_k2(double c, uint64_t m) {
  assert(m >= 2);
  const uint64_t K = std::max(m, kSwitch);
  double head = 0.0;
  if (m < K) {
    head = sum_desc(
        [](uint64_t k) {
          const double L = std::log(static_cast<double>(k));
          return 1.0 / (static_cast<double>(k) * static_cast<double>(k) * L * L);
        },
        m, K - 1);
  }
  const double x = static_cast<double>(K);
  const double L = std::log(x);
  const double integral = integral_inv_x2_log2(x);
  const double f = 1.0 / (x * x * L * L);
  const double fp = -2.0 * (L + 1.0) / (x * x * x * L * L * L);
  return c * (head + integral + 0.5 * f - fp / 12.0);
}

double tail_sum_k1(double c, uint64_t m) {
  assert(m >= 2);
  const uint64_t K = std::max(m, kSwitch);
  double head = 0.0;
  if (m < K) {
    head = sum_desc(
        [](uint64_t k) {
          const double L = std::log(static_cast<double>(k));
          return 1.0 / (static_cast<double>(k) * L * L);
        },
        m, K - 1);
  }
  const double x = static_cast<double>(K);
  const double L = std::log(x);
  const double integral = 1.0 / L;
  const double f = 1.0 / (x * L * L);
  const double fp = -(L + 2.0) / (x * x * L * L * L);
  return c * (head + integral + 0.5 * f - fp / 12.0);
}

}  // namespace bgw
