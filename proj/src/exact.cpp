#include "bgw/exact.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "bgw/errors.hpp"
#include "bgw/walk.hpp"

namespace bgw::oracle {

std::vector<std::pair<int64_t, double>> FiniteStepLaw::support() const {
  std::vector<std::pair<int64_t, double>> s;
  for (size_t t = 0; t < probs.size(); ++t) {
    if (probs[t] > 0.0) s.emplace_back(static_cast<int64_t>(t) - 1, probs[t]);
  }
  return s;
}

FiniteStepLaw finite_step_law(const OffspringLaw& law, uint64_t offspring_cap) {
  FiniteStepLaw out;
  uint64_t cap = offspring_cap;
  if (!law.tail()) {
    cap = law.k_head() - 1;  // exact, nothing to lump
  }
  out.probs.resize(cap + 1);
  for (uint64_t k = 0; k < cap; ++k) out.probs[k] = law.prob(k);
  out.probs[cap] = law.tail_from(cap);
  out.lumped_mass = law.tail_from(cap + 1);
  return out;
}

std::vector<double> pmf_Wn(const FiniteStepLaw& law, uint64_t n) {
  const int64_t K = law.max_step();
  const size_t width = static_cast<size_t>(n) * static_cast<size_t>(K + 1) + 1;
  std::vector<double> cur(width, 0.0), next(width, 0.0);
  cur[n] = 1.0;  // offset: index v + n
  for (uint64_t t = 0; t < n; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    for (size_t i = 0; i < width; ++i) {
      if (cur[i] == 0.0) continue;
      for (int64_t x = -1; x <= K; ++x) {
        const double p = law.prob_step(x);
        if (p == 0.0) continue;
        const int64_t j = static_cast<int64_t>(i) + x;
        if (j >= 0 && j < static_cast<int64_t>(width)) next[j] += cur[i] * p;
      }
    }
    std::swap(cur, next);
  }
  return cur;
}

ZetaTable zeta_table(const FiniteStepLaw& law, uint64_t n_max) {
  const int64_t K = law.max_step();
  ZetaTable out;
  out.pmf.assign(n_max + 1, 0.0);
  out.survival.assign(n_max + 1, 0.0);
  out.survival[0] = 1.0;
  // alive[v] = P(W_t = v, zeta > t); downward skip-free, so death happens
  // only from v = 0 through the step -1.
  std::vector<double> alive(n_max * static_cast<uint64_t>(K) + 1, 0.0),
      next(alive.size(), 0.0);
  alive[0] = 1.0;
  for (uint64_t t = 0; t < n_max; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    out.pmf[t + 1] = alive[0] * law.prob_step(-1);
    for (size_t v = 0; v < alive.size(); ++v) {
      if (alive[v] == 0.0) continue;
      for (int64_t x = -1; x <= K; ++x) {
        const double p = law.prob_step(x);
        if (p == 0.0) continue;
        const int64_t v2 = static_cast<int64_t>(v) + x;
        if (v2 >= 0 && v2 < static_cast<int64_t>(next.size())) {
          next[v2] += alive[v] * p;
        }
      }
    }
    std::swap(alive, next);
    double s = 0.0;
    for (double a : alive) s += a;
    out.survival[t + 1] = s;
  }
  return out;
}

double prob_T1_gt(const FiniteStepLaw& law, uint64_t n) {
  if (n == 0) return 1.0;
  const int64_t K = law.max_step();
  // alive[i] = P(W_t = -1 - i, T_1 > t): the walk so far stays <= -1.
  std::vector<double> alive(n + 1, 0.0), next(n + 1, 0.0);
  // First step must land at or below -1; only x = -1 does.
  alive[0] = law.prob_step(-1);
  for (uint64_t t = 1; t < n; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    for (size_t i = 0; i < alive.size(); ++i) {
      if (alive[i] == 0.0) continue;
      for (int64_t x = -1; x <= K; ++x) {
        const double p = law.prob_step(x);
        if (p == 0.0) continue;
        const int64_t v2 = -1 - static_cast<int64_t>(i) + x;  // new value
        if (v2 <= -1) {
          const size_t j = static_cast<size_t>(-1 - v2);
          if (j < next.size()) next[j] += alive[i] * p;
        }
      }
    }
    std::swap(alive, next);
  }
  double s = 0.0;
  for (double a : alive) s += a;
  return s;
}

double prob_nonneg(const FiniteStepLaw& law, uint64_t k) {
  const std::vector<double> pmf = pmf_Wn(law, k);
  double s = 0.0;
  for (size_t i = k; i < pmf.size(); ++i) s += pmf[i];  // v = i - k >= 0
  return s;
}

double prob_weak_ladder_at(const FiniteStepLaw& law, uint64_t j) {
  const int64_t K = law.max_step();
  // alive[d] = P(max_{s<=t} W_s - W_t = d); drawdown walks on [0, t].
  std::vector<double> alive(j + 1, 0.0), next(j + 1, 0.0);
  alive[0] = 1.0;
  for (uint64_t t = 0; t < j; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    for (size_t d = 0; d < alive.size(); ++d) {
      if (alive[d] == 0.0) continue;
      for (int64_t x = -1; x <= K; ++x) {
        const double p = law.prob_step(x);
        if (p == 0.0) continue;
        const int64_t d2 = std::max<int64_t>(static_cast<int64_t>(d) - x, 0);
        if (d2 < static_cast<int64_t>(next.size())) next[d2] += alive[d] * p;
      }
    }
    std::swap(alive, next);
  }
  return alive[0];
}

namespace {

// Depth-first enumeration over support^n with incremental state.
struct Enumerator {
  const std::vector<std::pair<int64_t, double>> support;
  const uint64_t n;
  std::vector<int64_t> incs;
  std::function<void(const std::vector<int64_t>&, double)> leaf;

  Enumerator(const FiniteStepLaw& law, uint64_t n_) : support(law.support()), n(n_) {
    incs.reserve(n_);
  }

  void run(double prob) { descend(prob); }

  void descend(double prob) {
    if (incs.size() == n) {
      leaf(incs, prob);
      return;
    }
    for (const auto& [x, p] : support) {
      incs.push_back(x);
      descend(prob * p);
      incs.pop_back();
    }
  }
};

WalkPath path_from_increments(const std::vector<int64_t>& incs) {
  WalkPath p;
  p.w.resize(incs.size() + 1);
  p.w[0] = 0;
  for (size_t i = 0; i < incs.size(); ++i) p.w[i + 1] = p.w[i] + incs[i];
  return p;
}

uint64_t last_ladder_of_incs(const std::vector<int64_t>& incs) {
  int64_t v = 0, best = 0;
  uint64_t at = 0;
  for (size_t i = 0; i < incs.size(); ++i) {
    v += incs[i];
    if (v >= best) {
      best = v;
      at = i + 1;
    }
  }
  return at;
}

}  // namespace

std::vector<double> pmf_In_enum(const FiniteStepLaw& law, uint64_t n) {
  std::vector<double> out(n + 1, 0.0);
  Enumerator e(law, n);
  e.leaf = [&](const std::vector<int64_t>& incs, double prob) {
    out[last_ladder_of_incs(incs)] += prob;
  };
  e.run(1.0);
  return out;
}

std::map<std::pair<uint64_t, uint64_t>, double> joint_zeta_clip_In(
    const FiniteStepLaw& law, uint64_t n) {
  // Dense accumulation, converted to a map at the end.
  std::vector<std::vector<double>> grid(n + 2, std::vector<double>(n + 1, 0.0));
  Enumerator e(law, n);
  e.leaf = [&](const std::vector<int64_t>& incs, double prob) {
    int64_t v = 0, best = 0;
    uint64_t at = 0, zeta = n + 1;
    for (size_t i = 0; i < incs.size(); ++i) {
      v += incs[i];
      if (v < 0 && zeta == n + 1) zeta = i + 1;
      if (v >= best) {
        best = v;
        at = i + 1;
      }
    }
    grid[zeta][at] += prob;
  };
  e.run(1.0);
  std::map<std::pair<uint64_t, uint64_t>, double> out;
  for (uint64_t z = 0; z <= n + 1; ++z) {
    for (uint64_t j = 0; j <= n; ++j) {
      if (grid[z][j] > 0.0) out[{z, j}] = grid[z][j];
    }
  }
  return out;
}

PathLaw law_walk_given_zeta_eq(const FiniteStepLaw& law, uint64_t n) {
  PathLaw out;
  double total = 0.0;
  Enumerator e(law, n);
  e.leaf = [&](const std::vector<int64_t>& incs, double prob) {
    int64_t v = 0;
    for (size_t i = 0; i < incs.size(); ++i) {
      v += incs[i];
      if (v < 0) {
        if (i + 1 != n) return;  // died early
        break;
      }
      if (i + 1 == n) return;  // survived to n: zeta > n
    }
    if (v != -1) return;  // skip-free: zeta entry is always at -1
    out[incs] += prob;
    total += prob;
  };
  e.run(1.0);
  for (auto& [k, p] : out) p /= total;
  return out;
}

PathLaw law_Zn(const FiniteStepLaw& law, uint64_t n) {
  PathLaw out;
  Enumerator e(law, n - 1);
  e.leaf = [&](const std::vector<int64_t>& incs, double prob) {
    WalkPath p = path_from_increments(incs);
    p.w.push_back(-1);  // the forced bridge point
    const WalkPath z = vervaat(p);
    std::vector<int64_t> key(n);
    for (uint64_t i = 0; i < n; ++i) key[i] = z.inc(i);
    out[key] += prob;
  };
  e.run(1.0);
  return out;
}

PathLaw law_Zn_given_excursion(const FiniteStepLaw& law, uint64_t n) {
  // The raw construction always rotates into a path that stays nonnegative
  // and ends at -1, so that predicate is vacuous here. The real constraint,
  // the one the tree sampler retries on, is that the forced increment is a
  // legal step (>= -1); only then is the output a Lukasiewicz excursion.
  PathLaw all = law_Zn(law, n);
  PathLaw out;
  double total = 0.0;
  for (const auto& [incs, p] : all) {
    bool legal = true;
    for (int64_t x : incs)
      if (x < -1) {
        legal = false;
        break;
      }
    if (legal) {
      out[incs] = p;
      total += p;
    }
  }
  for (auto& [k, p] : out) p /= total;
  return out;
}

PathLaw law_vecZ_prefix_impl(const FiniteStepLaw& law, uint64_t n) {
  PathLaw out;
  Enumerator e(law, n);
  e.leaf = [&](const std::vector<int64_t>& incs, double prob) {
    const uint64_t m = last_ladder_of_incs(incs);
    std::vector<int64_t> prefix(m);
    for (uint64_t t = 0; t < m; ++t) prefix[t] = incs[m - 1 - t];
    out[prefix] += prob;
  };
  e.run(1.0);
  return out;
}

PathLaw law_vecZ_prefix_reference(const FiniteStepLaw& law, uint64_t n) {
  const std::vector<double> in_pmf = pmf_In_enum(law, n);
  PathLaw out;
  for (uint64_t m = 0; m <= n; ++m) {
    if (in_pmf[m] == 0.0) continue;
    // law of an m-step walk conditioned to stay >= 0, weighted by P(I_n = m).
    PathLaw cond;
    double total = 0.0;
    Enumerator e(law, m);
    e.leaf = [&](const std::vector<int64_t>& incs, double prob) {
      int64_t v = 0;
      for (int64_t x : incs) {
        v += x;
        if (v < 0) return;
      }
      cond[incs] += prob;
      total += prob;
    };
    e.run(1.0);
    for (const auto& [k, p] : cond) out[k] += in_pmf[m] * p / total;
  }
  return out;
}

double total_variation(const PathLaw& a, const PathLaw& b) {
  double acc = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      acc += ia->second;
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      acc += ib->second;
      ++ib;
    } else {
      acc += std::fabs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return 0.5 * acc;
}

}  // namespace bgw::oracle
