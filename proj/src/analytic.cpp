#include "bgw/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "bgw/errors.hpp"
#include "bgw/tail_series.hpp"

namespace bgw {

namespace {

constexpr uint64_t kSwitch = 4096;

// Gauss-Legendre 8-point nodes/weights on [-1, 1] (positive half).
constexpr double kGLx[4] = {0.18343464249564980494, 0.52553240991632898582,
                            0.79666647741362673959, 0.96028985649753623168};
constexpr double kGLw[4] = {0.36268378337836198297, 0.31370664587788728734,
                            0.22238103445337447054, 0.10122853629037625915};

template <class F>
double panel_gl8(F g, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 4; ++i)
    acc += kGLw[i] * (g(mid + half * kGLx[i]) + g(mid - half * kGLx[i]));
  return acc * half;
}

// phi(q) = q + ln(1-q) = -q^2 (1/2 + q/3 + q^2/4 + ...), q in [0, 1).
double log_deficit(double q) {
  if (q >= 0.25) return q + std::log1p(-q);
  double acc = 0.0, p = 1.0;
  for (int j = 0; j < 64; ++j) {
    const double add = p / (j + 2.0);
    acc += add;
    if (add < 1e-18 * acc) break;
    p *= q;
  }
  return -q * q * acc;
}

// e^z - 1 - z for z <= 0.
double expm1m(double z) {
  if (z < -0.01) return std::expm1(z) - z;
  double acc = 0.0, p = z * z;  // term z^j / j! from j = 2
  for (int j = 2; j < 24; ++j) {
    p /= j;
    acc += p;
    if (std::fabs(p) < 1e-19 * std::fabs(acc)) break;
    p *= z;
  }
  return acc;
}

// Weights 1/(k^2 ln^2 k) for k < kSwitch, built once.
const std::vector<double>& inv_k2log2k() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kSwitch, 0.0);
    for (uint64_t k = 2; k < kSwitch; ++k) {
      const double L = std::log(static_cast<double>(k));
      t[k] = 1.0 / (static_cast<double>(k) * static_cast<double>(k) * L * L);
    }
    return t;
  }();
  return table;
}

// int_{x_lo}^inf e^(x lambda) / (x^2 ln^2 x) dx for lambda <= 0, x_lo > 1.
// In u = ln x the integrand decays at least like e^{-u}/u^2, so unit
// Gauss-Legendre panels with early termination cover every regime.
double exp_tail_integral(double lambda, double x_lo) {
  if (lambda == 0.0) return integral_inv_x2_log2(x_lo);
  auto g = [lambda](double u) {
    const double x = std::exp(u);
    return std::exp(x * lambda - u) / (u * u);
  };
  const double u_lo = std::log(x_lo);
  double acc = 0.0;
  int quiet = 0;
  for (int j = 0; j < 400; ++j) {
    const double a = u_lo + j, b = a + 1.0;
    const double part = panel_gl8(g, a, b);
    acc += part;
    if (part < 1e-17 * acc) {
      if (++quiet >= 2) break;
    } else {
      quiet = 0;
    }
  }
  return acc;
}

struct Deficiency {
  double q, lambda, phi;
  double d(double k) const { return k * phi + expm1m(k * lambda); }
  double dprime(double x) const {
    return phi + lambda * std::expm1(x * lambda);
  }
};

// sum_{k>=m} d_k(q) / (k^2 ln^2 k): explicit terms to the switch point,
// Euler-Maclaurin correction, then the integral in two regions split where
// x lambda = -1 so that the exact (xq - 1) antiderivatives are only used
// where they do not cancel against each other.
double tail_deficiency_sum(const Deficiency& dc, uint64_t m) {
  const auto& w = inv_k2log2k();
  double acc = 0.0, comp = 0.0;
  for (uint64_t k = kSwitch - 1; m < kSwitch && k >= m; --k) {
    const double y = dc.d(static_cast<double>(k)) * w[k] - comp;
    const double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
    if (k == m) break;
  }

  const double xK = static_cast<double>(std::max(m, kSwitch));
  const double LK = std::log(xK);
  const double fK = dc.d(xK) / (xK * xK * LK * LK);
  const double fpK = (dc.dprime(xK) -
                      (2.0 * dc.d(xK) / xK) * (1.0 + 1.0 / LK)) /
                     (xK * xK * LK * LK);
  acc += 0.5 * fK - fpK / 12.0;

  const double x_star =
      std::min(1e290, dc.lambda < 0 ? -1.0 / dc.lambda : 1e290);
  const double xB = std::max(xK, x_star);

  if (xB > xK) {
    // d(e^u) e^{-u} / u^2 grows toward the top, so walk panels downward.
    auto g = [&dc](double u) {
      const double x = std::exp(u);
      return dc.d(x) * std::exp(-u) / (u * u);
    };
    const double u_top = std::log(xB), u_bot = std::log(xK);
    double part_acc = 0.0;
    for (int j = 0; j < 1200; ++j) {
      const double b = u_top - j;
      const double a = std::max(u_bot, b - 1.0);
      const double part = panel_gl8(g, a, b);
      part_acc += part;
      if (a == u_bot || (j >= 3 && part < 1e-17 * part_acc)) break;
    }
    acc += part_acc;
  }

  acc += dc.q / std::log(xB) - integral_inv_x2_log2(xB) +
         exp_tail_integral(dc.lambda, xB);
  return acc;
}

}  // namespace

double gen_fn(const OffspringLaw& law, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw InputError("s must lie in [0, 1]");
  if (s == 1.0) return 1.0;

  double acc = 0.0, comp = 0.0;
  auto add = [&](double y0) {
    const double y = y0 - comp;
    const double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  };

  const auto& head = law.head();
  double p = 1.0;
  for (size_t i = 0; i < head.size(); ++i) {
    if (head[i] != 0.0) add(head[i] * p);
    p *= s;
  }
  if (!law.tail() || s == 0.0) return acc;

  const double c = law.tail()->c;
  const uint64_t m = law.tail()->k_min;
  const double lam = std::log(s);
  const auto& w = inv_k2log2k();
  double sp = std::pow(s, static_cast<double>(m));
  for (uint64_t k = m; k < kSwitch; ++k) {
    if ((k & 1023) == 0) sp = std::exp(lam * static_cast<double>(k));
    add(c * sp * w[k]);
    sp *= s;
  }
  const double xK = static_cast<double>(std::max(m, kSwitch));
  const double LK = std::log(xK);
  const double fK = std::exp(lam * xK) / (xK * xK * LK * LK);
  const double fpK = fK * (lam - (2.0 / xK) * (1.0 + 1.0 / LK));
  add(c * (0.5 * fK - fpK / 12.0));
  add(c * exp_tail_integral(lam, xK));
  return acc;
}

double one_generation_map(const OffspringLaw& law, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw InputError("q must lie in [0, 1]");
  if (q == 0.0) return 0.0;
  if (q == 1.0) return 1.0 - law.prob(0);

  Deficiency dc;
  dc.q = q;
  dc.lambda = std::log1p(-q);
  dc.phi = log_deficit(q);

  double deficit = 0.0, comp = 0.0;
  auto add = [&](double y0) {
    const double y = y0 - comp;
    const double t = deficit + y;
    comp = (t - deficit) - y;
    deficit = t;
  };
  const auto& head = law.head();
  for (size_t i = 0; i < head.size(); ++i)
    if (head[i] != 0.0) add(head[i] * dc.d(static_cast<double>(i)));
  if (law.tail()) add(law.tail()->c * tail_deficiency_sum(dc, law.tail()->k_min));

  const double mean = 1.0 + law.mean_deviation();
  return q * mean - deficit;
}

HeightTailTable height_tail(const OffspringLaw& law, uint64_t n_max) {
  if (n_max < 1) throw InputError("n_max must be at least 1");
  HeightTailTable t;
  t.Q.reserve(n_max + 1);
  t.nQ.reserve(n_max + 1);
  double q = 1.0;
  t.Q.push_back(q);
  t.nQ.push_back(0.0);
  for (uint64_t n = 1; n <= n_max; ++n) {
    q = one_generation_map(law, q);
    t.Q.push_back(q);
    t.nQ.push_back(static_cast<double>(n) * q);
  }
  return t;
}

std::vector<double> comparison_rho_tail(uint64_t n_max) {
  if (n_max < 1) throw InputError("n_max must be at least 1");
  std::vector<double> q(n_max + 1);
  q[0] = 1.0;
  for (uint64_t n = 0; n < n_max; ++n)
    q[n + 1] = q[n] * (1.0 - 0.5 * std::sqrt(q[n]));
  return q;
}

CriticalSlope critical_slope(const OffspringLaw& law) {
  const double q1 = 1e-4, q2 = 1e-5;
  CriticalSlope cs;
  cs.f_coarse = one_generation_map(law, q1) / q1;
  cs.f_fine = one_generation_map(law, q2) / q2;
  const double u1 = 1.0 / std::log(1.0 / q1), u2 = 1.0 / std::log(1.0 / q2);
  cs.extrapolated = cs.f_fine + (cs.f_fine - cs.f_coarse) * u2 / (u1 - u2);
  return cs;
}

}  // namespace bgw
