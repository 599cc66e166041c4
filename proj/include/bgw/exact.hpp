#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "bgw/offspring.hpp"

namespace bgw::oracle {

// Finite step law for exact computations: probs[t] = P(X = t-1) for
// t = 0 .. max_step+1. For analytic tails, all offspring mass from the cap
// on is folded onto the cap (lumped_mass reports the folded remainder).
struct FiniteStepLaw {
  std::vector<double> probs;
  double lumped_mass = 0.0;

  int64_t max_step() const { return static_cast<int64_t>(probs.size()) - 2; }
  double prob_step(int64_t x) const {
    const int64_t t = x + 1;
    return (t < 0 || t >= static_cast<int64_t>(probs.size())) ? 0.0
           : probs[static_cast<size_t>(t)];
  }
  // Support of X restricted to positive-probability steps.
  std::vector<std::pair<int64_t, double>> support() const;
};

FiniteStepLaw finite_step_law(const OffspringLaw& law, uint64_t offspring_cap = 64);

// Exact pmf of W_n: result[v + n] = P(W_n = v), v in [-n, n*max_step].
std::vector<double> pmf_Wn(const FiniteStepLaw& law, uint64_t n);

// zeta = first entrance time into the negative half-line.
struct ZetaTable {
  std::vector<double> pmf;       // pmf[t] = P(zeta = t), t = 0..n_max (pmf[0] = 0)
  std::vector<double> survival;  // survival[t] = P(zeta > t)
};
ZetaTable zeta_table(const FiniteStepLaw& law, uint64_t n_max);

double prob_T1_gt(const FiniteStepLaw& law, uint64_t n);   // P(T_1 > n)
double prob_nonneg(const FiniteStepLaw& law, uint64_t k);  // P(W_k >= 0)

// P(j is a weak ladder epoch), by the drawdown dynamic program
// u_t = W_t - max_{s<=t} W_s, u' = min(u + x, 0); the epoch event is u_j = 0.
// Independent of the duality identity it is used to test.
double prob_weak_ladder_at(const FiniteStepLaw& law, uint64_t j);

// Exhaustive-enumeration laws over support^n; n small (toy law: 4^n paths).
std::vector<double> pmf_In_enum(const FiniteStepLaw& law, uint64_t n);

// Joint law of (zeta clipped at n+1, I_n); key = (zeta_clip, i_n).
std::map<std::pair<uint64_t, uint64_t>, double> joint_zeta_clip_In(
    const FiniteStepLaw& law, uint64_t n);

// Path laws keyed by increment vectors.
using PathLaw = std::map<std::vector<int64_t>, double>;

PathLaw law_walk_given_zeta_eq(const FiniteStepLaw& law, uint64_t n);
// Pushforward of the local coupling: n-1 free increments, forced landing
// at -1, Vervaat rotation. law_Zn is the raw construction; the _given_
// variant conditions on the forced increment being a legal step (>= -1),
// which is the event the tree sampler retries on.
PathLaw law_Zn(const FiniteStepLaw& law, uint64_t n);
PathLaw law_Zn_given_excursion(const FiniteStepLaw& law, uint64_t n);

// Tail-coupling prefix law: what the reversal construction actually emits
// (enumerated over the auxiliary walk), and the reference mixture
// P(I_n = m) x law(m-step walk | stays >= 0). Keys are increment vectors,
// whose length identifies m.
PathLaw law_vecZ_prefix_impl(const FiniteStepLaw& law, uint64_t n);
PathLaw law_vecZ_prefix_reference(const FiniteStepLaw& law, uint64_t n);

double total_variation(const PathLaw& a, const PathLaw& b);

}  // namespace bgw::oracle
