#include <doctest.h>

#include <bgw/exact.hpp>
#include <bgw/offspring.hpp>
#include <bgw/rng.hpp>
#include <bgw/scaling.hpp>
#include <bgw/tree.hpp>
#include <bgw/walk.hpp>

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <vector>

using namespace bgw;

namespace {

OffspringLaw toy() { return OffspringLaw::head_only({0.5, 0.1, 0.3, 0.1}); }

// All increment vectors over the toy support {-1,0,1,2}; cb gets each
// vector with its probability.
template <typename F>
void enumerate_paths(const oracle::FiniteStepLaw& law, uint64_t n, F&& cb) {
  auto sup = law.support();
  std::vector<int64_t> inc(n);
  std::vector<size_t> idx(n, 0);
  for (;;) {
    double p = 1.0;
    for (uint64_t i = 0; i < n; ++i) {
      inc[i] = sup[idx[i]].first;
      p *= sup[idx[i]].second;
    }
    cb(inc, p);
    uint64_t pos = 0;
    while (pos < n && ++idx[pos] == sup.size()) idx[pos++] = 0;
    if (pos == n) break;
  }
}

WalkPath from_increments(const std::vector<int64_t>& inc) {
  WalkPath p;
  p.w.assign(1, 0);
  for (int64_t x : inc) p.w.push_back(p.w.back() + x);
  return p;
}

}  // namespace

TEST_CASE("entrance time pmf equals the bridge pmf over n") {
  // P(zeta = n) = P(W_n = -1) / n for every downward-skip-free walk.
  OffspringLaw law = toy();
  oracle::FiniteStepLaw fl = oracle::finite_step_law(law);
  oracle::ZetaTable zt = oracle::zeta_table(fl, 14);
  CHECK(zt.pmf[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(zt.pmf[2] == doctest::Approx(0.05).epsilon(1e-12));
  for (uint64_t n = 1; n <= 14; ++n) {
    std::vector<double> wn = oracle::pmf_Wn(fl, n);
    double bridge = wn[n - 1];  // index v + n at v = -1
    CHECK(zt.pmf[n] == doctest::Approx(bridge / (double)n).epsilon(1e-9));
  }
}

TEST_CASE("cycle lemma exhaustively to n = 10") {
  // Every path summing to -1 with legal steps has exactly one rotation
  // that is an excursion, and the first-argmin rotation finds it.
  OffspringLaw law = toy();
  oracle::FiniteStepLaw fl = oracle::finite_step_law(law);
  for (uint64_t n : {3ull, 6ull, 10ull}) {
    uint64_t paths_checked = 0;
    enumerate_paths(fl, n, [&](const std::vector<int64_t>& inc, double) {
      int64_t sum = 0;
      for (int64_t x : inc) sum += x;
      if (sum != -1) return;
      ++paths_checked;
      int excursions = 0;
      std::vector<int64_t> rot(n);
      for (uint64_t r = 0; r < n; ++r) {
        for (uint64_t i = 0; i < n; ++i) rot[i] = inc[(r + i) % n];
        if (is_excursion(from_increments(rot))) ++excursions;
      }
      REQUIRE(excursions == 1);
      REQUIRE(is_excursion(vervaat(from_increments(inc))));
    });
    CHECK(paths_checked > 0);
  }
}

TEST_CASE("vervaat of the bridge law is the entrance-time law, exactly") {
  // Pushforward of law(W | W_n = -1) under the rotation, against
  // law(W | zeta = n); both normalized, total variation at zero.
  OffspringLaw law = toy();
  oracle::FiniteStepLaw fl = oracle::finite_step_law(law);
  for (uint64_t n : {2ull, 5ull, 8ull}) {
    oracle::PathLaw pushed;
    double bridge_mass = 0;
    enumerate_paths(fl, n, [&](const std::vector<int64_t>& inc, double p) {
      int64_t sum = 0;
      for (int64_t x : inc) sum += x;
      if (sum != -1 || p == 0.0) return;
      bridge_mass += p;
      WalkPath v = vervaat(from_increments(inc));
      std::vector<int64_t> key(n);
      for (uint64_t i = 0; i < n; ++i) key[i] = v.inc(i);
      pushed[key] += p;
    });
    for (auto& kv : pushed) kv.second /= bridge_mass;
    oracle::PathLaw cond = oracle::law_walk_given_zeta_eq(fl, n);
    CHECK(oracle::total_variation(pushed, cond) < 1e-12);
  }
}

TEST_CASE("last ladder epoch factorizes over the split point") {
  // P(I_n = j) = P(zeta > j) P(T_1 > n - j), by enumeration on one side
  // and the two independent dynamic programs on the other.
  OffspringLaw law = toy();
  oracle::FiniteStepLaw fl = oracle::finite_step_law(law);
  for (uint64_t n : {4ull, 9ull, 12ull}) {
    std::vector<double> lhs = oracle::pmf_In_enum(fl, n);
    oracle::ZetaTable zt = oracle::zeta_table(fl, n);
    REQUIRE(lhs.size() == n + 1);
    for (uint64_t j = 0; j <= n; ++j) {
      double rhs = zt.survival[j] * oracle::prob_T1_gt(fl, n - j);
      CHECK(lhs[j] == doctest::Approx(rhs).epsilon(1e-9));
    }
  }
}

TEST_CASE("weak ladder epoch probability is the survival function") {
  // Duality: P(n is a weak ladder epoch) = P(zeta > n). The left side uses
  // the drawdown dynamic program, fully independent of the zeta recursion.
  OffspringLaw law = toy();
  oracle::FiniteStepLaw fl = oracle::finite_step_law(law);
  oracle::ZetaTable zt = oracle::zeta_table(fl, 14);
  for (uint64_t n = 0; n <= 14; ++n)
    CHECK(oracle::prob_weak_ladder_at(fl, n) ==
          doctest::Approx(zt.survival[n]).epsilon(1e-9));
}

TEST_CASE("survival extraction from nonnegativity probabilities") {
  // The power-series extraction must reproduce the direct recursion from
  // exact P(W_k >= 0) inputs.
  OffspringLaw law = toy();
  oracle::FiniteStepLaw fl = oracle::finite_step_law(law);
  const uint64_t m = 12;
  std::vector<double> nonneg(m);  // slot j holds P(W_{j+1} >= 0)
  for (uint64_t k = 1; k <= m; ++k) nonneg[k - 1] = oracle::prob_nonneg(fl, k);
  std::vector<double> surv = zeta_survival_from_nonneg(nonneg);
  oracle::ZetaTable zt = oracle::zeta_table(fl, m);
  REQUIRE(surv.size() == m + 1);
  for (uint64_t k = 0; k <= m; ++k)
    CHECK(surv[k] == doctest::Approx(zt.survival[k]).epsilon(1e-9));
}

TEST_CASE("lukasiewicz roundtrip on ten thousand trees") {
  OffspringLaw law = toy();
  Rng rng(1001);
  for (int rep = 0; rep < 10000; ++rep) {
    uint64_t n = 1 + rng.below(40);
    PlaneTree t = sample_tree_exact_n(law, n, rng);
    REQUIRE(t.size() == n);
    WalkPath e = encode_lukasiewicz(t);
    CHECK(is_excursion(e));
    PlaneTree back = decode_lukasiewicz(e);
    REQUIRE(back.child_counts == t.child_counts);
    // child count = increment + 1, one vertex per step.
    for (uint64_t i = 0; i < n; ++i)
      CHECK((int64_t)t.child_counts[i] == e.inc(i) + 1);
  }
}

TEST_CASE("record and chained ladder scans agree") {
  // Weak ladder epochs as running records coincide with the chain of
  // first weak ascents.
  OffspringLaw law = toy();
  StepLaw step(law);
  Rng rng(77);
  for (int rep = 0; rep < 1000; ++rep) {
    WalkPath p = sample_walk(step, 1 + rng.below(1000), rng);
    FluctuationMarkers m = fluctuation_markers(p);
    std::vector<uint64_t> chain = {0};
    for (;;) {
      uint64_t last = chain.back();
      uint64_t next = 0;
      for (uint64_t j = last + 1; j <= p.n(); ++j)
        if (p.w[j] >= p.w[last]) { next = j; break; }
      if (next == 0) break;
      chain.push_back(next);
    }
    REQUIRE(m.ladder_epochs == chain);
  }
}

TEST_CASE("local coupling path laws, frozen exact values") {
  // TV(law(W | zeta = n), law(Z_n)) and its legal-forced-step variant on
  // the toy law; exact enumeration, values frozen as regression anchors.
  // Both sequences increase over {4, 6, 8} at this scale.
  OffspringLaw law = toy();
  oracle::FiniteStepLaw fl = oracle::finite_step_law(law);
  const double raw_expect[3] = {0.395915492958, 0.471779054353, 0.532543728723};
  const double legal_expect[3] = {0.022079672756, 0.141206469451, 0.214310824259};
  const uint64_t ns[3] = {4, 6, 8};
  for (int i = 0; i < 3; ++i) {
    oracle::PathLaw w = oracle::law_walk_given_zeta_eq(fl, ns[i]);
    oracle::PathLaw raw = oracle::law_Zn(fl, ns[i]);
    oracle::PathLaw legal = oracle::law_Zn_given_excursion(fl, ns[i]);
    CHECK(oracle::total_variation(w, raw) == doctest::Approx(raw_expect[i]).epsilon(1e-9));
    CHECK(oracle::total_variation(w, legal) == doctest::Approx(legal_expect[i]).epsilon(1e-9));
  }
}

TEST_CASE("tail coupling prefix laws coincide") {
  // The reversal implementation must emit exactly the mixture
  // P(I_n = m) x law(m steps | stays nonnegative).
  OffspringLaw law = toy();
  oracle::FiniteStepLaw fl = oracle::finite_step_law(law);
  for (uint64_t n : {3ull, 6ull, 8ull}) {
    oracle::PathLaw impl = oracle::law_vecZ_prefix_impl(fl, n);
    oracle::PathLaw ref = oracle::law_vecZ_prefix_reference(fl, n);
    CHECK(oracle::total_variation(impl, ref) < 1e-9);
  }
}

TEST_CASE("finite step law folds the analytic tail onto the cap") {
  OffspringLaw law = OffspringLaw::critical_tail_law(1.0 / 3.0, 3, 1e-10);
  oracle::FiniteStepLaw fl = oracle::finite_step_law(law, 64);
  CHECK(fl.lumped_mass == doctest::Approx(law.tail_from(65)).epsilon(1e-12));
  double mass = 0;
  for (double p : fl.probs) mass += p;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fl.prob_step(63) == doctest::Approx(law.prob(64) + law.tail_from(65)).epsilon(1e-12));
  CHECK(fl.prob_step(-1) == doctest::Approx(law.prob(0)).epsilon(1e-15));
  CHECK(fl.prob_step(-2) == 0.0);
}
