#pragma once

#include <cstdint>
#include <vector>

#include "bgw/offspring.hpp"

namespace bgw {

struct ScalingConstants {
  uint64_t n = 0;
  int64_t a_n = 0;
  double b_n = 0.0;          // negative for large n on heavy-tailed laws
  double ell_star_a_n = 0.0;
  double lambda_n = 0.0;     // 1 / ell_star_a_n
};

// P(X >= x), exact within the series budget; monotone nonincreasing in x.
double tail_prob(const StepLaw& law, int64_t x);

// L(x) := x * P(X >= x).
double slowly_varying_L(const StepLaw& law, int64_t x);

// ell*(x) = sum_{k >= x} P(X >= k) = sum_{i >= x+1} (i - x) P(X = i), x >= 1.
double ell_star(const StepLaw& law, int64_t x);

// a_n := smallest a with n P(X >= a) <= 1 (bracket checked);
// b_n := n * sum_{-1 <= i <= a_n} i P(X = i), summed directly.
ScalingConstants compute_constants(const StepLaw& law, uint64_t n);

// Survival probabilities P(zeta > k), k = 0..m, extracted from
// P(W_k >= 0) for k = 1..m through the exponential of the power series
// sum_k P(W_k >= 0) s^k / k (coefficient recurrence, O(m^2)).
std::vector<double> zeta_survival_from_nonneg(const std::vector<double>& nonneg_probs);

// Partial-sum estimate sum_{k=0}^{n} P(zeta > k) of the normalizing
// sequence, built on the extraction above. Requires n <= len(nonneg_probs).
double lambda_wiener_hopf(const std::vector<double>& nonneg_probs, uint64_t n);

}  // namespace bgw
