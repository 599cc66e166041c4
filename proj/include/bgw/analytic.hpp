#pragma once

#include <cstdint>
#include <vector>

#include "bgw/offspring.hpp"

namespace bgw {

// G(s) = sum_k mu(k) s^k for s in [0,1]; head summed exactly, tail summed
// explicitly to a switch point and closed with Euler-Maclaurin plus
// quadrature of the integral remainder. Relative error ~1e-12.
double gen_fn(const OffspringLaw& law, double s);

// 1 - G(1 - q) evaluated without cancellation: with d_k(q) =
// kq - 1 + (1-q)^k >= 0 and the law's exact mean m,
//   1 - G(1-q) = q m - sum_k mu(k) d_k(q),
// and each d_k is assembled from k(q + ln(1-q)) and e^z - 1 - z pieces that
// stay accurate down to subnormal q. The infinite tail is handled by the
// same switch-point scheme as the tail mass series.
double one_generation_map(const OffspringLaw& law, double q);

// Q[0] = 1, Q[n+1] = 1 - G(1 - Q[n]); Q[n] is the chance a tree reaches
// height n. nQ[n] = n * Q[n] is the diagnostic sequence.
struct HeightTailTable {
  std::vector<double> Q;
  std::vector<double> nQ;
};
HeightTailTable height_tail(const OffspringLaw& law, uint64_t n_max);

// Reference recursion with square-root deficiency: Qh[0] = 1,
// Qh[n+1] = Qh[n] (1 - sqrt(Qh[n])/2); decays like 1/n^2.
std::vector<double> comparison_rho_tail(uint64_t n_max);

// Two-point estimate of G'(1-): f(q) = (1 - G(1-q))/q evaluated at
// q = 1e-4 and 1e-5, extrapolated linearly in u = 1/ln(1/q).
struct CriticalSlope {
  double f_coarse = 0;  // q = 1e-4
  double f_fine = 0;    // q = 1e-5
  double extrapolated = 0;
};
CriticalSlope critical_slope(const OffspringLaw& law);

}  // namespace bgw
