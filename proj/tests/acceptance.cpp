// Acceptance gate. Prints one line per criterion, C1 through C8, each
// PASS or FAIL with every underlying deviation and its pinned tolerance;
// exits 0 only when all eight hold. Statistical criteria rerun the full
// experiment pipeline at the pinned seeds, so a run takes minutes.
// Experiments at n = 1e6 are pinned to two worker threads: replicate
// seeding makes the numbers thread-count invariant, the pin only bounds
// peak memory on small boxes.

#include <bgw/analytic.hpp>
#include <bgw/errors.hpp>
#include <bgw/exact.hpp>
#include <bgw/harness.hpp>
#include <bgw/io.hpp>
#include <bgw/offspring.hpp>
#include <bgw/refdist.hpp>
#include <bgw/rng.hpp>
#include <bgw/scaling.hpp>
#include <bgw/tree.hpp>
#include <bgw/walk.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <string>
#include <vector>

using namespace bgw;

namespace {

OffspringLaw c13() {
  return OffspringLaw::critical_tail_law(1.0 / 3.0, 3, 1e-10);
}

OffspringLaw toy() { return OffspringLaw::head_only({0.5, 0.1, 0.3, 0.1}); }

struct Line {
  bool pass = true;
  std::string detail;

  void add(const char* name, double value, double tol, bool ok) {
    char buf[192];
    std::snprintf(buf, sizeof(buf), "  %s=%.6g (tol %.3g)%s", name, value,
                  tol, ok ? "" : " !");
    detail += buf;
    pass = pass && ok;
  }
  void add_verdicts(const ExperimentReport& rep) {
    for (const Verdict& v : rep.verdicts)
      add(v.name.c_str(), v.value, v.tolerance, v.pass);
  }
};

int emit(int k, const Line& line) {
  std::printf("C%d %s%s\n", k, line.pass ? "PASS" : "FAIL",
              line.detail.c_str());
  std::fflush(stdout);
  return line.pass ? 0 : 1;
}

ExperimentConfig pinned(TheoremId id, const OffspringLaw& law,
                        std::vector<uint64_t> grid, uint64_t reps,
                        std::map<std::string, double> tol,
                        unsigned threads) {
  ExperimentConfig cfg;
  cfg.theorem = id;
  cfg.law_hash = law_hash(law);
  cfg.n_grid = std::move(grid);
  cfg.reps = reps;
  cfg.seed = 2026;
  cfg.threads = threads;
  cfg.tolerances = std::move(tol);
  return cfg;
}

WalkPath rotate_increments(const WalkPath& p, uint64_t r) {
  const uint64_t n = p.n();
  WalkPath out;
  out.w.resize(n + 1);
  out.w[0] = 0;
  for (uint64_t i = 0; i < n; ++i)
    out.w[i + 1] = out.w[i] + p.inc((r + i) % n);
  return out;
}

// Exact identities, both sides from independent computations, slack 1e-9.
Line criterion1() {
  Line line;
  const double eps = 1e-9;
  const OffspringLaw law = toy();
  const oracle::FiniteStepLaw fl = oracle::finite_step_law(law);
  const oracle::ZetaTable zt = oracle::zeta_table(fl, 14);

  // Entrance-time pmf against the bridge pmf over n.
  double dev = 0;
  for (uint64_t n = 1; n <= 14; ++n) {
    const std::vector<double> wn = oracle::pmf_Wn(fl, n);
    dev = std::max(dev, std::fabs(zt.pmf[n] - wn[n - 1] / (double)n));
  }
  line.add("kemperman_dev", dev, eps, dev <= eps);

  // Every path summing to -1 has exactly one excursion rotation, and the
  // first-minimum rotation finds it. Exhaustive over the step support.
  const auto sup = fl.support();
  uint64_t bad = 0;
  for (uint64_t n = 2; n <= 10; ++n) {
    std::vector<size_t> idx(n, 0);
    WalkPath p;
    p.w.assign(n + 1, 0);
    for (;;) {
      for (uint64_t i = 0; i < n; ++i)
        p.w[i + 1] = p.w[i] + sup[idx[i]].first;
      if (p.w[n] == -1) {
        uint64_t hits = 0, hit_r = 0;
        for (uint64_t r = 0; r < n; ++r) {
          if (is_excursion(rotate_increments(p, r))) {
            ++hits;
            hit_r = r;
          }
        }
        if (hits != 1 || vervaat(p).w != rotate_increments(p, hit_r).w)
          ++bad;
      }
      size_t j = 0;
      while (j < n && ++idx[j] == sup.size()) idx[j++] = 0;
      if (j == n) break;
    }
  }
  line.add("cycle_lemma_violations", (double)bad, 0, bad == 0);

  // Last-ladder-epoch pmf factorizes over the split point.
  dev = 0;
  for (uint64_t n = 1; n <= 12; ++n) {
    const std::vector<double> in_pmf = oracle::pmf_In_enum(fl, n);
    for (uint64_t j = 0; j <= n; ++j)
      dev = std::max(dev, std::fabs(in_pmf[j] - zt.survival[j] *
                                                    oracle::prob_T1_gt(
                                                        fl, n - j)));
  }
  line.add("split_pmf_dev", dev, eps, dev <= eps);

  // Weak ladder epoch probability equals the entrance-time survival.
  dev = 0;
  for (uint64_t j = 0; j <= 14; ++j)
    dev = std::max(
        dev, std::fabs(oracle::prob_weak_ladder_at(fl, j) - zt.survival[j]));
  line.add("ladder_duality_dev", dev, eps, dev <= eps);

  // Tree coding roundtrip on ten thousand trees.
  Rng rng(11);
  uint64_t bad_rt = 0;
  for (int i = 0; i < 10000; ++i) {
    const uint64_t n = 1 + rng.below(40);
    PlaneTree t = sample_tree_exact_n(law, n, rng);
    const WalkPath e = encode_lukasiewicz(t);
    const PlaneTree back = decode_lukasiewicz(e);
    if (back.child_counts != t.child_counts) ++bad_rt;
    for (uint64_t v = 0; v < n; ++v)
      if ((int64_t)t.child_counts[v] != e.inc(v) + 1) ++bad_rt;
  }
  line.add("roundtrip_violations", (double)bad_rt, 0, bad_rt == 0);

  // Survival extraction from the nonnegativity sequence against the DP.
  std::vector<double> nonneg(12);
  for (uint64_t k = 1; k <= 12; ++k)
    nonneg[k - 1] = oracle::prob_nonneg(fl, k);
  const std::vector<double> surv = zeta_survival_from_nonneg(nonneg);
  dev = 0;
  for (uint64_t k = 0; k <= 12; ++k)
    dev = std::max(dev, std::fabs(surv[k] - zt.survival[k]));
  line.add("factorization_dev", dev, eps, dev <= eps);
  return line;
}

// Exact total variation of the local coupling, nonincreasing over the grid.
Line criterion2() {
  Line line;
  const OffspringLaw law = toy();
  ExperimentConfig cfg = pinned(TheoremId::DTV_ORACLE, law, {4, 6, 8}, 0,
                                {{"trend_margin", 0.0}}, 1);
  line.add_verdicts(run_experiment(law, cfg, nullptr));
  return line;
}

// Limit laws of the size-conditioned functionals at n = 1e6, 2000 reps.
Line criterion3() {
  Line line;
  const OffspringLaw law = c13();
  line.add_verdicts(run_experiment(
      law, pinned(TheoremId::T1, law, {1000000}, 2000,
                  {{"median_window", 0.1}, {"ks_window", 0.1}}, 2),
      nullptr));
  line.add_verdicts(run_experiment(
      law,
      pinned(TheoremId::T2, law, {1000000}, 2000,
             {{"exp_ks", 0.15}, {"uniform_quartile_window", 0.1}}, 2),
      nullptr));
  line.add_verdicts(run_experiment(
      law, pinned(TheoremId::T3, law, {1000000}, 2000,
                  {{"frechet_window", 0.05}}, 2),
      nullptr));
  return line;
}

// Limit laws of the tail-conditioned functionals at n = 1e5, 2000 reps.
Line criterion4() {
  Line line;
  const OffspringLaw law = c13();
  line.add_verdicts(run_experiment(
      law, pinned(TheoremId::T4, law, {100000}, 2000, {{"j_ks", 0.1}}, 2),
      nullptr));
  line.add_verdicts(run_experiment(
      law, pinned(TheoremId::T5, law, {100000}, 2000,
                  {{"resolution_margin", 0.0}}, 2),
      nullptr));
  line.add_verdicts(run_experiment(
      law, pinned(TheoremId::T6, law, {100000}, 2000, {{"exp_ks", 0.15}}, 2),
      nullptr));
  line.add_verdicts(run_experiment(
      law, pinned(TheoremId::T8, law, {100000}, 2000,
                  {{"quantile_window", 0.1}}, 2),
      nullptr));
  return line;
}

// Rescaled path profiles approach their limit shapes across the n grid.
Line criterion5() {
  Line line;
  const OffspringLaw law = c13();
  for (TheoremId id : {TheoremId::PATH_LOCAL, TheoremId::PATH_TAIL})
    line.add_verdicts(run_experiment(
        law, pinned(id, law, {10000, 100000, 1000000}, 500,
                    {{"trend_margin", 0.0}}, 2),
        nullptr));
  return line;
}

// Fluctuation estimates on free walks: the ladder-count limit law plus the
// two slowly varying ratio trends.
Line criterion6() {
  Line line;
  const OffspringLaw law = c13();
  line.add_verdicts(run_experiment(
      law,
      pinned(TheoremId::HN_EXP, law, {100000}, 2000, {{"exp_ks", 0.15}}, 2),
      nullptr));
  const ExperimentReport ladder = run_experiment(
      law, pinned(TheoremId::LADDER, law, {10000, 100000, 1000000}, 2000,
                  {{"ratio_window", 1.0}, {"trend_margin", 0.0}}, 2),
      nullptr);
  for (const Verdict& v : ladder.verdicts)
    if (v.name == "r3_trend" || v.name == "t1_scaled_trend")
      line.add(v.name.c_str(), v.value, v.tolerance, v.pass);
  return line;
}

// Height-tail recursions and the stable-law sampler transform.
Line criterion7() {
  Line line;
  const std::vector<double> qh = comparison_rho_tail(20000);
  const double ratio_dev = std::fabs(4.0 * qh[20000] / qh[10000] - 1.0);
  line.add("comparison_ratio_dev", ratio_dev, 0.02, ratio_dev <= 0.02);

  const HeightTailTable ht = height_tail(c13(), 100000);
  const int viol = (ht.nQ[10000] >= ht.nQ[1000]) +
                   (ht.nQ[100000] >= ht.nQ[10000]);
  line.add("nq_decade_violations", (double)viol, 0, viol == 0);

  Rng rng(2026);
  const RefdistSelftest st = refdist_selftest(1000000, rng);
  double worst = 0;
  for (const LaplaceCheck& lc : st.laplace)
    worst = std::max(worst,
                     std::fabs(lc.estimate - lc.target) / lc.std_error);
  line.add("laplace_worst_se", worst, 3.0, worst <= 3.0);
  return line;
}

// Identical seeds, different thread counts: reports and plot data must be
// byte-identical.
Line criterion8() {
  Line line;
  const OffspringLaw law = c13();
  ExperimentConfig cfg;
  cfg.theorem = TheoremId::T4;
  cfg.law_hash = law_hash(law);
  cfg.n_grid = {10000};
  cfg.reps = 200;
  cfg.seed = 77;

  std::vector<PlotRow> plot1, plot3;
  cfg.threads = 1;
  const ExperimentReport r1 = run_experiment(law, cfg, &plot1);
  cfg.threads = 3;
  const ExperimentReport r3 = run_experiment(law, cfg, &plot3);

  const bool same_report = r1.json == r3.json;
  bool same_plot = plot1.size() == plot3.size();
  if (same_plot)
    for (size_t i = 0; i < plot1.size(); ++i)
      same_plot = same_plot && plot1[i].n == plot3[i].n &&
                  plot1[i].replicate == plot3[i].replicate &&
                  plot1[i].functional == plot3[i].functional &&
                  plot1[i].value == plot3[i].value;
  line.add("report_mismatch", same_report ? 0 : 1, 0, same_report);
  line.add("plotdata_mismatch", same_plot ? 0 : 1, 0, same_plot);
  return line;
}

}  // namespace

int main() {
  int failed = 0;
  failed += emit(1, criterion1());
  failed += emit(2, criterion2());
  failed += emit(3, criterion3());
  failed += emit(4, criterion4());
  failed += emit(5, criterion5());
  failed += emit(6, criterion6());
  failed += emit(7, criterion7());
  failed += emit(8, criterion8());
  std::printf("%d of 8 criteria pass\n", 8 - failed);
  return failed == 0 ? 0 : 3;
}
