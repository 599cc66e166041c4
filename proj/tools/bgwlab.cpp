// bgwlab: laws, constants, samplers, oracles, and verification experiments
// for critical trees with Cauchy-type offspring tails. See docs/cli.md for
// the man-style reference.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bgw/analytic.hpp"
#include "bgw/errors.hpp"
#include "bgw/exact.hpp"
#include "bgw/harness.hpp"
#include "bgw/io.hpp"
#include "bgw/looptree.hpp"
#include "bgw/offspring.hpp"
#include "bgw/refdist.hpp"
#include "bgw/rng.hpp"
#include "bgw/scaling.hpp"
#include "bgw/stats.hpp"
#include "bgw/tree.hpp"
#include "bgw/version.hpp"
#include "bgw/walk.hpp"

namespace {

using bgw::BudgetError;
using bgw::InputError;
using bgw::IoError;
using bgw::VerifyError;
using ordered_json = nlohmann::ordered_json;

// --------------------------------------------------------------------------
// counts: scientific notation is accepted but must denote an exact integer
// ("2.5e3" is 2500; "1e-2" and "3.14" are rejected).

uint64_t parse_count(const std::string& raw) {
  const std::string err = "'" + raw + "' is not a nonnegative integer count";
  std::string s = raw;
  if (!s.empty() && s[0] == '+') s.erase(0, 1);
  if (s.empty()) throw InputError(err);
  const size_t epos = s.find_first_of("eE");
  std::string mant = epos == std::string::npos ? s : s.substr(0, epos);
  long exp10 = 0;
  if (epos != std::string::npos) {
    const std::string es = s.substr(epos + 1);
    try {
      size_t used = 0;
      exp10 = std::stol(es, &used);
      if (used != es.size()) throw InputError(err);
    } catch (const std::exception&) {
      throw InputError(err);
    }
  }
  const size_t dot = mant.find('.');
  std::string digits =
      dot == std::string::npos ? mant : mant.substr(0, dot) + mant.substr(dot + 1);
  if (dot != std::string::npos)
    exp10 -= static_cast<long>(mant.size() - dot - 1);
  if (digits.empty()) throw InputError(err);
  for (char ch : digits)
    if (ch < '0' || ch > '9') throw InputError(err);
  while (digits.size() > 1 && digits[0] == '0') digits.erase(0, 1);
  while (exp10 < 0) {
    if (digits.back() != '0')
      throw InputError("'" + raw + "' does not denote an exact integer");
    digits.pop_back();
    if (digits.empty()) digits = "0";
    ++exp10;
  }
  if (digits.size() + static_cast<size_t>(exp10) > 15)
    throw InputError("'" + raw + "' exceeds the supported count range (1e15)");
  uint64_t v = std::stoull(digits);
  for (long i = 0; i < exp10; ++i) v *= 10;
  return v;
}

std::vector<uint64_t> parse_grid(const std::vector<std::string>& raw) {
  std::vector<uint64_t> grid;
  grid.reserve(raw.size());
  for (const auto& tok : raw) grid.push_back(parse_count(tok));
  return grid;
}

std::string meta_comment(const std::string& hash, uint64_t seed) {
  return std::string("# bgwlab ") + bgw::kBgwlabVersion + " law=" + hash +
         " seed=" + std::to_string(seed) + "\n";
}

void log_run(const std::string& hash, uint64_t seed) {
  std::fprintf(stderr, "[bgwlab %s] law=%s seed=%llu\n", bgw::kBgwlabVersion,
               hash.c_str(), static_cast<unsigned long long>(seed));
}

uint64_t replicate_seed(uint64_t master, uint64_t i) {
  bgw::SplitMix64 sm(master ^ (0x9e3779b97f4a7c15ull * (i + 1)));
  sm.next();
  return sm.next();
}

bgw::OffspringLaw toy_law() {
  return bgw::OffspringLaw::head_only({0.5, 0.1, 0.3, 0.1});
}

bgw::PlaneTree rebuild_tree(const bgw::OffspringLaw& law,
                            const std::string& mode, uint64_t n,
                            uint64_t seed) {
  bgw::Rng rng(seed);
  if (mode == "exact-n") return bgw::sample_tree_exact_n(law, n, rng);
  if (mode == "approx-zn") return bgw::sample_tree_approx_Zn(law, n, rng);
  const bgw::StepLaw step(law);
  const bgw::ScalingConstants sc = bgw::compute_constants(step, n);
  if (mode == "tail-rejection")
    return bgw::sample_tree_tail(law, sc, n, rng,
                                 bgw::TailTreeStrategy::rejection);
  if (mode == "tail-vecz")
    return bgw::sample_tree_tail(law, sc, n, rng, bgw::TailTreeStrategy::vecZ);
  throw InputError("unknown sampler mode '" + mode + "'");
}

// --------------------------------------------------------------------------
// law

struct LawBuildArgs {
  std::string family;
  double c = 0;
  std::string kmin = "3";
  std::vector<double> head;
  double mean_tol = 1e-10;
  std::string out;
};

void run_law_build(const LawBuildArgs& a) {
  std::optional<bgw::OffspringLaw> law;
  if (!a.family.empty()) {
    if (a.c <= 0) throw InputError("--family log2 requires --c > 0");
    law = bgw::OffspringLaw::critical_tail_law(a.c, parse_count(a.kmin),
                                               a.mean_tol);
  } else if (!a.head.empty()) {
    law = bgw::OffspringLaw::head_only(a.head, a.mean_tol);
  } else {
    throw InputError("law build needs --family log2 --c --kmin, or --head");
  }
  bgw::write_law(*law, a.out);
  const std::string h = bgw::law_hash(*law);
  log_run(h, 0);
  ordered_json j;
  j["out"] = a.out;
  j["law_hash"] = h;
  j["mass_deviation"] = law->mass_deviation();
  j["mean_deviation"] = law->mean_deviation();
  std::printf("%s\n", j.dump().c_str());
}

void run_law_audit(const std::string& path) {
  const bgw::OffspringLaw law = bgw::read_law(path);
  const std::string h = bgw::law_hash(law);
  log_run(h, 0);
  ordered_json j;
  j["law_hash"] = h;
  j["k_head"] = law.k_head();
  if (law.tail()) {
    j["tail"] = {{"family", "c_over_k2_log2k"},
                 {"c", law.tail()->c},
                 {"kmin", law.tail()->k_min}};
  } else {
    j["tail"] = nullptr;
  }
  j["mass_deviation"] = law.mass_deviation();
  j["mean_deviation"] = law.mean_deviation();
  j["mean_tol"] = law.mean_tol();
  std::printf("%s\n", j.dump(2).c_str());
  if (law.mass_deviation() > law.mean_tol() ||
      law.mean_deviation() > law.mean_tol())
    throw VerifyError("law deviations exceed mean_tol");
}

// --------------------------------------------------------------------------
// constants

void run_constants(const std::string& law_path, const std::string& n_raw) {
  const bgw::OffspringLaw law = bgw::read_law(law_path);
  log_run(bgw::law_hash(law), 0);
  const uint64_t n = parse_count(n_raw);
  if (n == 0) throw InputError("--n must be positive");
  const bgw::StepLaw step(law);
  const bgw::ScalingConstants sc = bgw::compute_constants(step, n);
  ordered_json j;
  j["n"] = sc.n;
  j["a_n"] = sc.a_n;
  j["b_n"] = sc.b_n;
  j["ell_star_a_n"] = sc.ell_star_a_n;
  j["lambda_n"] = sc.lambda_n;
  std::printf("%s\n", j.dump(2).c_str());
}

// --------------------------------------------------------------------------
// sample walk / sample tree

struct SampleWalkArgs {
  std::string law_path, n_raw, emit = "stats", out;
  uint64_t seed = 1;
};

void run_sample_walk(const SampleWalkArgs& a) {
  const bgw::OffspringLaw law = bgw::read_law(a.law_path);
  const std::string h = bgw::law_hash(law);
  log_run(h, a.seed);
  const uint64_t n = parse_count(a.n_raw);
  if (n == 0) throw InputError("--n must be positive");
  const bgw::StepLaw step(law);
  bgw::Rng rng(a.seed);
  const bgw::WalkPath w = bgw::sample_walk(step, n, rng);
  if (a.emit == "path") {
    std::ostringstream out;
    out << meta_comment(h, a.seed) << "w\n";
    for (int64_t v : w.w) out << v << "\n";
    if (a.out.empty())
      std::fputs(out.str().c_str(), stdout);
    else
      bgw::write_text_file(a.out, out.str());
    return;
  }
  const bgw::FluctuationMarkers m = bgw::fluctuation_markers(w);
  ordered_json j;
  j["version"] = bgw::kBgwlabVersion;
  j["law_hash"] = h;
  j["n"] = n;
  j["seed"] = a.seed;
  j["final"] = w.w[n];
  if (m.zeta)
    j["zeta"] = *m.zeta;
  else
    j["zeta"] = nullptr;
  j["i_n"] = m.i_n;
  j["h_n"] = m.h_n;
  const std::string text = j.dump(2) + "\n";
  if (a.out.empty())
    std::fputs(text.c_str(), stdout);
  else
    bgw::write_text_file(a.out, text);
}

struct SampleTreeArgs {
  std::string law_path, mode = "approx-zn", n_raw, out;
  uint64_t reps = 1, seed = 1;
};

void run_sample_tree(const SampleTreeArgs& a) {
  const bgw::OffspringLaw law = bgw::read_law(a.law_path);
  const std::string h = bgw::law_hash(law);
  log_run(h, a.seed);
  const uint64_t n = parse_count(a.n_raw);
  if (n == 0) throw InputError("--n must be positive");
  if (a.reps == 0) throw InputError("--reps must be positive");
  std::vector<bgw::TreeStatsRecord> records;
  records.reserve(a.reps);
  for (uint64_t i = 0; i < a.reps; ++i) {
    const uint64_t si = replicate_seed(a.seed, i);
    const bgw::PlaneTree tree = rebuild_tree(law, a.mode, n, si);
    const bgw::TreeStats st = bgw::tree_stats(tree, true);
    bgw::TreeStatsRecord r;
    r.n = n;
    r.seed = si;
    r.size = st.size;
    r.deg = bgw::top_degrees(tree, 32);
    r.u_star = st.u_star;
    r.h_star = st.h_star;
    r.height = st.height;
    r.mode = a.mode;
    records.push_back(std::move(r));
  }
  bgw::write_text_file(a.out,
                       meta_comment(h, a.seed) + bgw::tree_stats_to_ndjson(records));
}

// --------------------------------------------------------------------------
// loop analyze: rebuild each recorded tree, cross-check it against the
// record, and measure how close its rescaled loop graph is to the circle.

struct LoopAnalyzeArgs {
  std::string in, law_path, out;
};

void run_loop_analyze(const LoopAnalyzeArgs& a) {
  const bgw::OffspringLaw law = bgw::read_law(a.law_path);
  const std::string h = bgw::law_hash(law);
  log_run(h, 0);
  const std::vector<bgw::TreeStatsRecord> records =
      bgw::read_tree_stats_ndjson(a.in);
  const bgw::StepLaw step(law);
  std::map<uint64_t, bgw::ScalingConstants> constants;
  std::ostringstream out;
  out << meta_comment(h, 0)
      << "n,seed,cycle_len_ratio,max_graft_radius_ratio,gh_upper_bound\n";
  for (size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.mode.empty())
      throw InputError(a.in + ": record " + std::to_string(i) +
                       " carries no sampler mode, cannot rebuild");
    const bgw::PlaneTree tree = rebuild_tree(law, r.mode, r.n, r.seed);
    const bgw::TreeStats st = bgw::tree_stats(tree, true);
    if (st.size != r.size || (r.deg.empty() ? 0 : r.deg[0]) != st.delta0)
      throw VerifyError(a.in + ": record " + std::to_string(i) +
                        " does not match the rebuilt tree; wrong law file?");
    if (st.size > 0xFFFFFFFFull)
      throw InputError("tree too large for the loop graph representation");
    auto it = constants.find(r.n);
    if (it == constants.end())
      it = constants.emplace(r.n, bgw::compute_constants(step, r.n)).first;
    const bgw::LooptreeGraph loop = bgw::build_looptree(tree);
    const bgw::GraftDecomposition gd = bgw::radius_and_decomposition(
        loop, static_cast<uint32_t>(st.u_star));
    const bgw::CircleProximity cp = bgw::circle_proximity(gd, it->second);
    out << r.n << "," << r.seed << "," << bgw::fmt_double(cp.cycle_len_ratio)
        << "," << bgw::fmt_double(cp.max_graft_radius_ratio) << ","
        << bgw::fmt_double(cp.gh_upper_bound) << "\n";
  }
  bgw::write_text_file(a.out, out.str());
}

// --------------------------------------------------------------------------
// analytic height-tail

void run_height_tail(const std::string& law_path, const std::string& nmax_raw,
                     const std::string& out_path) {
  const bgw::OffspringLaw law = bgw::read_law(law_path);
  const std::string h = bgw::law_hash(law);
  log_run(h, 0);
  const uint64_t nmax = parse_count(nmax_raw);
  const bgw::HeightTailTable table = bgw::height_tail(law, nmax);
  std::ostringstream out;
  out << meta_comment(h, 0) << "n,Q,nQ\n";
  for (uint64_t n = 0; n < table.Q.size(); ++n)
    out << n << "," << bgw::fmt_double(table.Q[n]) << ","
        << bgw::fmt_double(table.nQ[n]) << "\n";
  bgw::write_text_file(out_path, out.str());
}

// --------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string theorem, law_path, out, mode, plot_path;
  std::vector<std::string> n_raw, tol_raw;
  uint64_t reps = 0, seed = 1;
  unsigned threads = 0;
};

void run_verify(const VerifyArgs& a) {
  const bgw::OffspringLaw law = bgw::read_law(a.law_path);
  bgw::ExperimentConfig cfg;
  cfg.theorem = bgw::theorem_from_string(a.theorem);
  cfg.law_hash = bgw::law_hash(law);
  cfg.n_grid = parse_grid(a.n_raw);
  cfg.reps = a.reps;
  cfg.seed = a.seed;
  cfg.mode = a.mode;
  cfg.threads = a.threads;
  for (const auto& kv : a.tol_raw) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw InputError("--tol expects name=value, got '" + kv + "'");
    try {
      cfg.tolerances[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw InputError("--tol expects name=value, got '" + kv + "'");
    }
  }
  log_run(cfg.law_hash, cfg.seed);

  std::vector<bgw::PlotRow> plot;
  const bool want_plot = !a.plot_path.empty();
  const bgw::ExperimentReport report =
      bgw::run_experiment(law, cfg, want_plot ? &plot : nullptr);
  bgw::write_text_file(a.out, report.json);
  if (want_plot) {
    std::ostringstream csv;
    csv << meta_comment(cfg.law_hash, cfg.seed) << "n,replicate,functional,value\n";
    for (const auto& row : plot)
      csv << row.n << "," << row.replicate << "," << row.functional << ","
          << bgw::fmt_double(row.value) << "\n";
    bgw::write_text_file(a.plot_path, csv.str());
  }
  for (const auto& v : report.verdicts)
    std::printf("%s %s: value=%s tolerance=%s (%s)\n",
                v.pass ? "PASS" : "FAIL", v.name.c_str(),
                bgw::fmt_double(v.value).c_str(),
                bgw::fmt_double(v.tolerance).c_str(), v.tolerance_name.c_str());
  if (!report.all_pass) throw VerifyError("verdicts failed; see " + a.out);
}

// --------------------------------------------------------------------------
// oracle: exact identities on a finite-support law (defaults to the toy law)

struct OracleArgs {
  std::string check, law_path;
  uint64_t nmax = 10;
};

void check_close(double got, double want, double tol, const std::string& what) {
  if (!(std::fabs(got - want) <= tol))
    throw VerifyError(what + ": got " + bgw::fmt_double(got) + ", want " +
                      bgw::fmt_double(want));
}

void oracle_kemperman(const bgw::oracle::FiniteStepLaw& fs, uint64_t nmax) {
  const bgw::oracle::ZetaTable zt = bgw::oracle::zeta_table(fs, nmax);
  for (uint64_t t = 1; t <= nmax; ++t) {
    const std::vector<double> pw = bgw::oracle::pmf_Wn(fs, t);
    check_close(zt.pmf[t], pw[t - 1] / static_cast<double>(t), 1e-9,
                "entrance-time pmf vs bridge pmf at n=" + std::to_string(t));
  }
  std::printf("kemperman ok up to n=%llu\n",
              static_cast<unsigned long long>(nmax));
}

void oracle_vervaat(const bgw::oracle::FiniteStepLaw& fs, uint64_t nmax) {
  if (nmax > 10) throw InputError("vervaat enumeration is capped at nmax=10");
  const auto sup = fs.support();
  uint64_t bridges = 0;
  for (uint64_t n = 1; n <= nmax; ++n) {
    std::vector<size_t> idx(n, 0);
    std::vector<int64_t> inc(n);
    for (;;) {
      int64_t sum = 0;
      for (uint64_t i = 0; i < n; ++i) {
        inc[i] = sup[idx[i]].first;
        sum += inc[i];
      }
      if (sum == -1) {
        ++bridges;
        // exactly one cyclic shift must be an excursion
        uint64_t hits = 0;
        for (uint64_t r = 0; r < n; ++r) {
          int64_t s = 0;
          bool ok = true;
          for (uint64_t k = 0; k < n; ++k) {
            s += inc[(r + k) % n];
            if (k + 1 < n && s < 0) {
              ok = false;
              break;
            }
          }
          if (ok && s == -1) ++hits;
        }
        if (hits != 1)
          throw VerifyError("cycle lemma violated: " + std::to_string(hits) +
                            " excursion rotations at n=" + std::to_string(n));
        bgw::WalkPath w;
        w.w.resize(n + 1);
        w.w[0] = 0;
        for (uint64_t i = 0; i < n; ++i) w.w[i + 1] = w.w[i] + inc[i];
        if (!bgw::is_excursion(bgw::vervaat(w)))
          throw VerifyError("vervaat output is not an excursion at n=" +
                            std::to_string(n));
      }
      size_t p = 0;
      while (p < n && ++idx[p] == sup.size()) {
        idx[p] = 0;
        ++p;
      }
      if (p == n) break;
    }
  }
  std::printf("vervaat ok up to n=%llu (%llu bridges)\n",
              static_cast<unsigned long long>(nmax),
              static_cast<unsigned long long>(bridges));
}

void oracle_in_pmf(const bgw::oracle::FiniteStepLaw& fs, uint64_t nmax) {
  if (nmax > 12) throw InputError("last-ladder-epoch enumeration is capped at nmax=12");
  const bgw::oracle::ZetaTable zt = bgw::oracle::zeta_table(fs, nmax);
  for (uint64_t n = 1; n <= nmax; ++n) {
    const std::vector<double> pmf = bgw::oracle::pmf_In_enum(fs, n);
    for (uint64_t j = 0; j <= n; ++j)
      check_close(pmf[j],
                  zt.survival[j] * bgw::oracle::prob_T1_gt(fs, n - j), 1e-9,
                  "last-ladder-epoch pmf at n=" + std::to_string(n) +
                      ", j=" + std::to_string(j));
  }
  std::printf("in-pmf ok up to n=%llu\n", static_cast<unsigned long long>(nmax));
}

void oracle_duality(const bgw::oracle::FiniteStepLaw& fs, uint64_t nmax) {
  const bgw::oracle::ZetaTable zt = bgw::oracle::zeta_table(fs, nmax);
  for (uint64_t j = 0; j <= nmax; ++j)
    check_close(bgw::oracle::prob_weak_ladder_at(fs, j), zt.survival[j], 1e-9,
                "ladder-epoch probability vs entrance-time survival at j=" +
                    std::to_string(j));
  std::printf("duality ok up to n=%llu\n", static_cast<unsigned long long>(nmax));
}

void oracle_dtv_local(const bgw::oracle::FiniteStepLaw& fs, uint64_t nmax) {
  std::vector<uint64_t> grid;
  for (uint64_t n : {uint64_t{4}, uint64_t{6}, uint64_t{8}})
    if (n <= nmax) grid.push_back(n);
  if (grid.size() < 2)
    throw InputError("dtv-local needs nmax >= 6 for at least two grid points");
  double prev = 2.0;
  bool increased = false;
  for (uint64_t n : grid) {
    const bgw::oracle::PathLaw w = bgw::oracle::law_walk_given_zeta_eq(fs, n);
    const double tv =
        bgw::oracle::total_variation(w, bgw::oracle::law_Zn(fs, n));
    const double tv_legal = bgw::oracle::total_variation(
        w, bgw::oracle::law_Zn_given_excursion(fs, n));
    std::printf("n=%llu tv=%s tv_legal_forced_step=%s\n",
                static_cast<unsigned long long>(n), bgw::fmt_double(tv).c_str(),
                bgw::fmt_double(tv_legal).c_str());
    increased = increased || tv > prev + 1e-12;
    prev = tv;
  }
  if (increased)
    throw VerifyError("total variation increased along the grid");
  std::printf("dtv-local ok\n");
}

void run_oracle(const OracleArgs& a) {
  if (a.nmax > 14) throw InputError("--nmax is capped at 14");
  if (a.nmax < 1) throw InputError("--nmax must be positive");
  bgw::OffspringLaw law =
      a.law_path.empty() ? toy_law() : bgw::read_law(a.law_path);
  log_run(bgw::law_hash(law), 0);
  const bgw::oracle::FiniteStepLaw fs = bgw::oracle::finite_step_law(law);
  if (a.check == "kemperman")
    oracle_kemperman(fs, a.nmax);
  else if (a.check == "vervaat")
    oracle_vervaat(fs, a.nmax);
  else if (a.check == "in-pmf")
    oracle_in_pmf(fs, a.nmax);
  else if (a.check == "duality")
    oracle_duality(fs, a.nmax);
  else if (a.check == "dtv-local")
    oracle_dtv_local(fs, a.nmax);
  else
    throw InputError("unknown check '" + a.check + "'");
}

// --------------------------------------------------------------------------
// refdist

void run_refdist_selftest(const std::string& n_raw, uint64_t seed) {
  const uint64_t n = parse_count(n_raw);
  if (n < 1000) throw InputError("selftest needs --n >= 1000");
  bgw::Rng rng(seed);
  const bgw::RefdistSelftest st = bgw::refdist_selftest(n, rng);
  ordered_json j;
  j["version"] = bgw::kBgwlabVersion;
  j["n"] = n;
  j["seed"] = seed;
  ordered_json lap = ordered_json::array();
  for (const auto& l : st.laplace)
    lap.push_back({{"lambda", l.lambda},
                   {"target", l.target},
                   {"estimate", l.estimate},
                   {"std_error", l.std_error}});
  j["laplace"] = lap;
  j["tail_ratio_at_1e3"] = st.tail_ratio_at_1e3;
  j["pareto_tail_at_10"] = st.pareto_tail_at_10;
  std::printf("%s\n", j.dump(2).c_str());
  if (n >= 100000) {
    for (const auto& l : st.laplace)
      if (!(std::fabs(l.estimate - l.target) <= 5.0 * l.std_error))
        throw VerifyError("transform check failed at lambda=" +
                          bgw::fmt_double(l.lambda));
    if (!(st.tail_ratio_at_1e3 > 0.7 && st.tail_ratio_at_1e3 < 1.4))
      throw VerifyError("tail mass ratio out of range");
    if (!(std::fabs(st.pareto_tail_at_10 - 0.1) <=
          5.0 * std::sqrt(0.09 / static_cast<double>(n))))
      throw VerifyError("pareto tail check failed");
  }
}

void run_refdist_calibrate(const std::string& n_raw, uint64_t seed) {
  const uint64_t n = parse_count(n_raw);
  if (n < 1000) throw InputError("calibrate needs --n >= 1000");
  bgw::Rng rng(seed);
  // E[exp(-lambda Z)] = exp(lambda ln lambda) exactly when the built-in
  // shift is right; each lambda re-measures the shift as
  // built_in + (ln(mean) - lambda ln lambda) / lambda.
  const double lambdas[3] = {0.5, 1.0, 2.0};
  double sum[3] = {0, 0, 0}, comp[3] = {0, 0, 0}, sumsq[3] = {0, 0, 0};
  for (uint64_t i = 0; i < n; ++i) {
    const double z = bgw::sample_cauchy1(rng);
    for (int k = 0; k < 3; ++k) {
      const double e = std::exp(-lambdas[k] * z);
      const double y = e - comp[k];
      const double t = sum[k] + y;
      comp[k] = (t - sum[k]) - y;
      sum[k] = t;
      sumsq[k] += e * e;
    }
  }
  ordered_json j;
  j["version"] = bgw::kBgwlabVersion;
  j["n"] = n;
  j["seed"] = seed;
  j["built_in_shift"] = bgw::cauchy1_shift();
  ordered_json arr = ordered_json::array();
  for (int k = 0; k < 3; ++k) {
    const double nn = static_cast<double>(n);
    const double m = sum[k] / nn;
    const double var = std::max(0.0, sumsq[k] / nn - m * m);
    const double se_m = std::sqrt(var / nn);
    const double lam = lambdas[k];
    const double shift =
        bgw::cauchy1_shift() + (std::log(m) - lam * std::log(lam)) / lam;
    arr.push_back({{"lambda", lam},
                   {"mean", m},
                   {"std_error", se_m},
                   {"measured_shift", shift},
                   {"shift_std_error", se_m / (m * lam)}});
  }
  j["measurements"] = arr;
  std::printf("%s\n", j.dump(2).c_str());
}

void run_refdist_table(const std::string& size_raw, const std::string& out) {
  const uint64_t size = parse_count(size_raw);
  if (size < 100 || size > 10000000)
    throw InputError("--size must be in [100, 1e7]");
  const std::vector<double>& ref = bgw::cauchy1_reference(size);
  std::ostringstream csv;
  csv << "# bgwlab " << bgw::kBgwlabVersion << " frozen 1-stable reference\n"
      << "x,F\n";
  for (size_t i = 0; i < ref.size(); ++i)
    csv << bgw::fmt_double(ref[i]) << ","
        << bgw::fmt_double((static_cast<double>(i) + 0.5) /
                           static_cast<double>(ref.size()))
        << "\n";
  bgw::write_text_file(out, csv.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and verification lab for critical trees with "
               "Cauchy-type offspring tails"};
  app.set_version_flag("--version", bgw::kBgwlabVersion);
  app.require_subcommand(1);

  // law
  auto* law_cmd = app.add_subcommand("law", "build and audit offspring laws");
  law_cmd->require_subcommand(1);
  LawBuildArgs lb;
  auto* law_build = law_cmd->add_subcommand("build", "construct a law file");
  law_build->add_option("--family", lb.family, "analytic tail family")
      ->check(CLI::IsMember({"log2"}));
  law_build->add_option("--c", lb.c, "tail constant");
  law_build->add_option("--kmin", lb.kmin, "first analytic-tail degree");
  law_build->add_option("--head", lb.head, "finite-support probabilities")
      ->delimiter(',');
  law_build->add_option("--mean-tol", lb.mean_tol, "construction tolerance");
  law_build->add_option("--out", lb.out, "output law file")->required();
  law_build->callback([&] { run_law_build(lb); });

  std::string audit_law;
  auto* law_audit = law_cmd->add_subcommand("audit", "print law deviations");
  law_audit->add_option("--law", audit_law, "law file")->required();
  law_audit->callback([&] { run_law_audit(audit_law); });

  // constants
  std::string const_law, const_n;
  auto* constants_cmd =
      app.add_subcommand("constants", "centering and scaling sequences");
  constants_cmd->add_option("--law", const_law, "law file")->required();
  constants_cmd->add_option("--n", const_n, "tree size")->required();
  constants_cmd->callback([&] { run_constants(const_law, const_n); });

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "draw walks and trees");
  sample_cmd->require_subcommand(1);
  SampleWalkArgs sw;
  auto* sample_walk = sample_cmd->add_subcommand("walk", "one free walk");
  sample_walk->add_option("--law", sw.law_path, "law file")->required();
  sample_walk->add_option("--n", sw.n_raw, "step count")->required();
  sample_walk->add_option("--seed", sw.seed, "master seed");
  sample_walk->add_option("--emit", sw.emit, "stats or path")
      ->check(CLI::IsMember({"stats", "path"}));
  sample_walk->add_option("--out", sw.out, "output file (default stdout)");
  sample_walk->callback([&] { run_sample_walk(sw); });

  SampleTreeArgs st;
  auto* sample_tree =
      sample_cmd->add_subcommand("tree", "conditioned trees, NDJSON stats");
  sample_tree->add_option("--law", st.law_path, "law file")->required();
  sample_tree
      ->add_option("--mode", st.mode, "sampler mode")
      ->check(CLI::IsMember(
          {"exact-n", "approx-zn", "tail-rejection", "tail-vecz"}));
  sample_tree->add_option("--n", st.n_raw, "target size")->required();
  sample_tree->add_option("--reps", st.reps, "replicates");
  sample_tree->add_option("--seed", st.seed, "master seed");
  sample_tree->add_option("--out", st.out, "NDJSON output")->required();
  sample_tree->callback([&] { run_sample_tree(st); });

  // loop
  auto* loop_cmd = app.add_subcommand("loop", "loop graph measurements");
  loop_cmd->require_subcommand(1);
  LoopAnalyzeArgs la;
  auto* loop_analyze =
      loop_cmd->add_subcommand("analyze", "circle proximity per record");
  loop_analyze->add_option("--in", la.in, "NDJSON stats input")->required();
  loop_analyze->add_option("--law", la.law_path, "law file")->required();
  loop_analyze->add_option("--out", la.out, "CSV output")->required();
  loop_analyze->callback([&] { run_loop_analyze(la); });

  // analytic
  auto* analytic_cmd =
      app.add_subcommand("analytic", "generating-function computations");
  analytic_cmd->require_subcommand(1);
  std::string ht_law, ht_nmax, ht_out;
  auto* height_tail =
      analytic_cmd->add_subcommand("height-tail", "height tail table");
  height_tail->add_option("--law", ht_law, "law file")->required();
  height_tail->add_option("--nmax", ht_nmax, "last height")->required();
  height_tail->add_option("--out", ht_out, "CSV output")->required();
  height_tail->callback([&] { run_height_tail(ht_law, ht_nmax, ht_out); });

  // verify
  VerifyArgs va;
  auto* verify_cmd =
      app.add_subcommand("verify", "run a verification experiment");
  verify_cmd->add_option("--theorem", va.theorem, "experiment id")->required();
  verify_cmd->add_option("--law", va.law_path, "law file")->required();
  verify_cmd->add_option("--n", va.n_raw, "size grid, ascending")
      ->required()
      ->delimiter(',');
  verify_cmd->add_option("--reps", va.reps, "replicates per grid point");
  verify_cmd->add_option("--seed", va.seed, "master seed");
  verify_cmd->add_option("--mode", va.mode, "sampler mode override");
  verify_cmd->add_option("--threads", va.threads,
                         "worker cap, 0 = available parallelism");
  verify_cmd->add_option("--out", va.out, "report JSON output")->required();
  verify_cmd->add_option("--emit-plotdata", va.plot_path,
                         "also write per-replicate functional values (CSV)");
  verify_cmd->add_option("--tol", va.tol_raw,
                         "tolerance override name=value (repeatable)");
  verify_cmd->callback([&] { run_verify(va); });

  // oracle
  OracleArgs oa;
  auto* oracle_cmd =
      app.add_subcommand("oracle", "exact small-n identities (toy law)");
  oracle_cmd->add_option("--check", oa.check, "which identity")
      ->required()
      ->check(CLI::IsMember(
          {"kemperman", "vervaat", "in-pmf", "dtv-local", "duality"}));
  oracle_cmd->add_option("--nmax", oa.nmax, "largest n (<= 14)");
  oracle_cmd->add_option("--law", oa.law_path,
                         "law file (default: built-in toy law)");
  oracle_cmd->callback([&] { run_oracle(oa); });

  // refdist
  auto* refdist_cmd =
      app.add_subcommand("refdist", "reference distribution utilities");
  refdist_cmd->require_subcommand(1);
  std::string rs_n = "1000000";
  uint64_t rs_seed = 0x5e1f7e57;
  auto* rd_selftest =
      refdist_cmd->add_subcommand("selftest", "transform and tail checks");
  rd_selftest->add_option("--n", rs_n, "sample size");
  rd_selftest->add_option("--seed", rs_seed, "seed");
  rd_selftest->callback([&] { run_refdist_selftest(rs_n, rs_seed); });

  std::string rc_n = "100000000";
  uint64_t rc_seed = 0xca11b7a7ull;
  auto* rd_calibrate = refdist_cmd->add_subcommand(
      "calibrate", "re-measure the 1-stable sampler shift");
  rd_calibrate->add_option("--n", rc_n, "sample size");
  rd_calibrate->add_option("--seed", rc_seed, "seed");
  rd_calibrate->callback([&] { run_refdist_calibrate(rc_n, rc_seed); });

  std::string rt_size = "100000", rt_out;
  auto* rd_table = refdist_cmd->add_subcommand(
      "table", "emit the frozen reference CDF table");
  rd_table->add_option("--size", rt_size, "reference sample size");
  rd_table->add_option("--out", rt_out, "CSV output")->required();
  rd_table->callback([&] { run_refdist_table(rt_size, rt_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 2;
  } catch (const VerifyError& e) {
    std::fprintf(stderr, "verification failure: %s\n", e.what());
    return 3;
  } catch (const BudgetError& e) {
    std::fprintf(stderr, "budget exceeded: %s\n", e.what());
    return 4;
  }
  return 0;
}
