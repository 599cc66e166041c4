#include "bgw/scaling.hpp"

#include <cmath>
#include <limits>

#include "bgw/errors.hpp"
#include "bgw/tail_series.hpp"

namespace bgw {

namespace {

// sum_{i >= m} i mu(i), m >= 0.
double weighted_tail_from(const OffspringLaw& law, uint64_t m) {
  double s = 0.0;
  for (uint64_t i = m; i < law.k_head(); ++i) {
    s += static_cast<double>(i) * law.head()[i];
  }
  if (law.tail()) {
    s += tail_sum_k1(law.tail()->c, std::max<uint64_t>(m, law.tail()->k_min));
  }
  return s;
}

}  // namespace

double tail_prob(const StepLaw& law, int64_t x) { return law.tail_prob(x); }

double slowly_varying_L(const StepLaw& law, int64_t x) {
  return static_cast<double>(x) * law.tail_prob(x);
}

double ell_star(const StepLaw& law, int64_t x) {
  const uint64_t m = static_cast<uint64_t>(x) + 1;  // offspring index x+1 and up
  return weighted_tail_from(law.law(), m) -
         static_cast<double>(x) * law.law().tail_from(m);
}

ScalingConstants compute_constants(const StepLaw& law, uint64_t n) {
  const double dn = static_cast<double>(n);

  // Smallest a with n P(X >= a) <= 1; P is nonincreasing in a.
  const auto small_enough = [&](int64_t a) { return dn * law.tail_prob(a) <= 1.0; };
  int64_t a_n;
  if (small_enough(-1)) {
    a_n = -1;
  } else {
    int64_t hi = 1;
    while (!small_enough(hi)) {
      if (hi > (int64_t{1} << 56)) {
        throw VerifyError("compute_constants: no bracket for a_n");
      }
      hi *= 2;
    }
    int64_t lo = hi == 1 ? -1 : hi / 2;  // small_enough(lo) is false
    while (hi - lo > 1) {
      const int64_t mid = lo + (hi - lo) / 2;
      (small_enough(mid) ? hi : lo) = mid;
    }
    a_n = hi;
  }
  if (a_n > -1 && !(dn * law.tail_prob(a_n) <= 1.0 && 1.0 < dn * law.tail_prob(a_n - 1))) {
    throw VerifyError("compute_constants: bracket invariant violated at a_n");
  }

  // Truncated mean, summed directly over the support up to a_n.
  double mean = 0.0, comp = 0.0;
  for (int64_t i = -1; i <= a_n; ++i) {
    const double y = static_cast<double>(i) * law.prob(i) - comp;
    const double t = mean + y;
    comp = (t - mean) - y;
    mean = t;
  }
  const double b_n = dn * mean;

  ScalingConstants sc;
  sc.n = n;
  sc.a_n = a_n;
  sc.b_n = b_n;
  sc.ell_star_a_n = a_n >= 1 ? ell_star(law, a_n) : ell_star(law, 1);
  sc.lambda_n = sc.ell_star_a_n > 0.0
                    ? 1.0 / sc.ell_star_a_n
                    : std::numeric_limits<double>::infinity();
  return sc;
}

std::vector<double> zeta_survival_from_nonneg(const std::vector<double>& nonneg_probs) {
  for (double p : nonneg_probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InputError("zeta_survival_from_nonneg: probability outside [0,1]");
    }
  }
  const size_t m = nonneg_probs.size();
  // p = exp(q) with q_k = P(W_k >= 0)/k: (k+1) p_{k+1} = sum_j (j+1) q_{j+1} p_{k-j}.
  // With (j+1) q_{j+1} = P(W_{j+1} >= 0) the recurrence needs no divisions by j.
  std::vector<double> p(m + 1);
  p[0] = 1.0;
  for (size_t k = 0; k < m; ++k) {
    double acc = 0.0;
    for (size_t j = 0; j <= k; ++j) {
      acc += nonneg_probs[j] * p[k - j];
    }
    p[k + 1] = acc / static_cast<double>(k + 1);
  }
  return p;
}

double lambda_wiener_hopf(const std::vector<double>& nonneg_probs, uint64_t n) {
  if (n > nonneg_probs.size()) {
    throw InputError("lambda_wiener_hopf: n exceeds the supplied probability table");
  }
  const std::vector<double> p = zeta_survival_from_nonneg(nonneg_probs);
  double s = 0.0;
  for (uint64_t k = 0; k <= n; ++k) s += p[k];
  return s;
}

}  // namespace bgw
