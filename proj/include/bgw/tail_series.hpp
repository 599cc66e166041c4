#pragma once

#include <cstdint>

namespace bgw {

// Exponential integral E1(x) = int_x^inf e^(-t)/t dt, x > 0.
// Series below 1, continued fraction above; ~1e-15 relative error.
double exp_int_e1(double x);

// tail_sum_k2(c, m) = sum_{k>=m} c / (k^2 ln^2 k),   m >= 2
// tail_sum_k1(c, m) = sum_{k>=m} c / (k   ln^2 k),   m >= 2
//
// Both sum directly up to a switch point and close with Euler-Maclaurin:
// the integral remainders are exact,
//   int_K^inf dx/(x   ln^2 x) = 1/ln K
//   int_K^inf dx/(x^2 ln^2 x) = 1/(K ln K) - E1(ln K),
// and the correction terms f(K)/2 - f'(K)/12 leave an error below 1e-18
// at the switch point used here.
double tail_sum_k2(double c, uint64_t m);
double tail_sum_k1(double c, uint64_t m);

// int_x^inf dt / (t^2 ln^2 t) = 1/(x ln x) - E1(ln x), x > 1.
double integral_inv_x2_log2(double x);

}  // namespace bgw
