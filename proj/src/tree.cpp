#include "bgw/tree.hpp"

#include <algorithm>
#include <string>

#include "bgw/errors.hpp"

namespace bgw {

namespace {

// Visits vertices in DFS order keeping the pending-children stack; the depth
// of vertex i is the stack size at arrival. Fn(i, child_count, depth).
template <typename CC, typename Fn>
void scan_depths(uint64_t n, CC cc, Fn visit) {
  static thread_local std::vector<uint64_t> stack;
  stack.clear();
  for (uint64_t i = 0; i < n; ++i) {
    if (!stack.empty()) --stack.back();
    uint64_t depth = stack.size();
    uint64_t k = cc(i);
    visit(i, k, depth);
    if (k > 0) {
      stack.push_back(k);
    } else {
      while (!stack.empty() && stack.back() == 0) stack.pop_back();
    }
  }
}

template <typename CC>
TreeStats stats_impl(uint64_t n, CC cc, bool with_height) {
  if (n == 0) throw InputError("empty tree");
  TreeStats s;
  s.size = n;
  uint64_t best = 0, second = 0, best_at = 0;
  for (uint64_t i = 0; i < n; ++i) {
    uint64_t k = cc(i);
    if (k > best) {
      second = best;
      best = k;
      best_at = i;
    } else if (k > second) {
      second = k;
    }
  }
  s.delta0 = best;
  s.delta1 = second;
  s.u_star = best_at;

  uint64_t depth_at_ustar = 0, max_depth = 0;
  if (with_height) {
    scan_depths(n, cc, [&](uint64_t i, uint64_t, uint64_t depth) {
      if (depth > max_depth) max_depth = depth;
      if (i == best_at) depth_at_ustar = depth;
    });
    s.height = max_depth;
    s.has_height = true;
  } else if (best_at > 0) {
    scan_depths(best_at + 1, cc, [&](uint64_t i, uint64_t, uint64_t depth) {
      if (i == best_at) depth_at_ustar = depth;
    });
  }

  // Same quantity off the path: the number of indices i < u_star whose
  // walk value is the minimum over [i, u_star].
  uint64_t records = 0;
  if (best_at > 0) {
    int64_t w = 0;  // running W_i rebuilt backwards below
    static thread_local std::vector<int64_t> wbuf;
    wbuf.clear();
    wbuf.reserve(best_at + 1);
    for (uint64_t i = 0; i <= best_at; ++i) {
      wbuf.push_back(w);
      w += static_cast<int64_t>(cc(i)) - 1;
    }
    int64_t runmin = wbuf[best_at];
    for (uint64_t i = best_at; i-- > 0;) {
      if (wbuf[i] <= runmin) {
        ++records;
        runmin = wbuf[i];
      }
    }
  }
  if (records != depth_at_ustar)
    throw VerifyError("depth bookkeeping mismatch: DFS depth " +
                      std::to_string(depth_at_ustar) + " vs record count " +
                      std::to_string(records));
  s.h_star = records;
  return s;
}

template <typename CC>
std::vector<uint64_t> top_degrees_impl(uint64_t n, CC cc, size_t k) {
  std::vector<uint64_t> degs(n);
  for (uint64_t i = 0; i < n; ++i) degs[i] = cc(i);
  size_t keep = std::min<size_t>(k, degs.size());
  std::partial_sort(degs.begin(), degs.begin() + keep, degs.end(),
                    std::greater<uint64_t>());
  degs.resize(keep);
  return degs;
}

}  // namespace

PlaneTree decode_lukasiewicz(const WalkPath& excursion) {
  uint64_t n = excursion.n();
  if (n == 0) throw InputError("empty path");
  PlaneTree t;
  t.child_counts.reserve(n);
  for (uint64_t i = 0; i < n; ++i) {
    int64_t x = excursion.inc(i);
    if (x < -1)
      throw InputError("not an excursion: step below -1 at index " +
                       std::to_string(i));
    if (excursion.w[i + 1] < 0 && i + 1 != n)
      throw InputError("not an excursion: negative at index " +
                       std::to_string(i + 1));
    t.child_counts.push_back(static_cast<uint64_t>(x + 1));
  }
  if (excursion.w[n] != -1)
    throw InputError("not an excursion: endpoint " +
                     std::to_string(excursion.w[n]) + ", expected -1");
  return t;
}

WalkPath encode_lukasiewicz(const PlaneTree& tree) {
  WalkPath p;
  p.w.reserve(tree.size() + 1);
  p.w.push_back(0);
  int64_t v = 0;
  for (uint64_t k : tree.child_counts) {
    v += static_cast<int64_t>(k) - 1;
    p.w.push_back(v);
  }
  return p;
}

TreeStats tree_stats(const PlaneTree& tree, bool with_height) {
  return stats_impl(
      tree.size(), [&](uint64_t i) { return tree.child_counts[i]; },
      with_height);
}

TreeStats stats_from_excursion(const WalkPath& excursion, bool with_height) {
  return stats_impl(
      excursion.n(),
      [&](uint64_t i) { return static_cast<uint64_t>(excursion.inc(i) + 1); },
      with_height);
}

std::vector<uint64_t> top_degrees(const PlaneTree& tree, size_t k) {
  return top_degrees_impl(
      tree.size(), [&](uint64_t i) { return tree.child_counts[i]; }, k);
}

std::vector<uint64_t> top_degrees_from_excursion(const WalkPath& excursion,
                                                 size_t k) {
  return top_degrees_impl(
      excursion.n(),
      [&](uint64_t i) { return static_cast<uint64_t>(excursion.inc(i) + 1); },
      k);
}

PlaneTree sample_bgw_free(const OffspringLaw& law, Rng& rng,
                          uint64_t step_cap) {
  PlaneTree t;
  int64_t v = 0;
  uint64_t steps = 0;
  do {
    if (++steps > step_cap)
      throw BudgetError("free tree draw exceeded " + std::to_string(step_cap) +
                        " steps");
    uint64_t k = law.sample(rng);
    t.child_counts.push_back(k);
    v += static_cast<int64_t>(k) - 1;
  } while (v >= 0);
  return t;
}

PlaneTree sample_tree_exact_n(const OffspringLaw& law, uint64_t n, Rng& rng,
                              uint64_t rejection_budget,
                              uint64_t* attempts_out) {
  if (n == 0) throw InputError("n must be positive");
  StepLaw step(law);
  static thread_local WalkPath bridge;
  static thread_local WalkPath exc;
  uint64_t spent = 0, attempts = 0;
  for (;;) {
    if (spent + n > rejection_budget)
      throw BudgetError("size-conditioned draw exceeded budget after " +
                        std::to_string(attempts) + " attempts");
    spent += n;
    ++attempts;
    sample_walk_into(step, n, rng, bridge);
    if (bridge.w[n] != -1) continue;
    vervaat_into(bridge, exc);
    if (attempts_out) *attempts_out = attempts;
    return decode_lukasiewicz(exc);
  }
}

PlaneTree sample_tree_approx_Zn(const OffspringLaw& law, uint64_t n, Rng& rng,
                                uint64_t* retries_out) {
  StepLaw step(law);
  static thread_local ZnSample zs;
  uint64_t retries = 0;
  for (;;) {
    build_Z_n_into(step, n, rng, zs);
    if (zs.excursion) break;
    ++retries;
  }
  if (retries_out) *retries_out = retries;
  return decode_lukasiewicz(zs.z);
}

PlaneTree sample_tree_tail(const OffspringLaw& law,
                           const ScalingConstants& constants, uint64_t n,
                           Rng& rng, TailTreeStrategy strategy,
                           uint64_t step_cap, uint64_t rejection_budget) {
  if (n == 0) throw InputError("n must be positive");
  if (step_cap == 0) step_cap = 128 * n;
  StepLaw step(law);
  if (strategy == TailTreeStrategy::vecZ) {
    static thread_local VecZn vz;
    build_vecZ_n_into(step, constants, n, rng, VecZStrategy::reversal,
                      step_cap, rejection_budget, vz);
    if (!vz.hit)
      throw BudgetError("tail draw: no return to -1 within " +
                        std::to_string(step_cap) + " steps");
    return decode_lukasiewicz(vz.path);
  }
  // Plain rejection: rerun free draws until one survives n steps.
  uint64_t spent = 0;
  for (;;) {
    PlaneTree t;
    int64_t v = 0;
    bool dead = false;
    while (true) {
      if (++spent > rejection_budget)
        throw BudgetError("tail rejection exceeded budget");
      if (t.size() >= step_cap)
        throw BudgetError("tail draw: no return to -1 within " +
                          std::to_string(step_cap) + " steps");
      uint64_t k = law.sample(rng);
      t.child_counts.push_back(k);
      v += static_cast<int64_t>(k) - 1;
      if (v < 0) {
        dead = t.size() < n;
        break;
      }
    }
    if (!dead) return t;
  }
}

}  // namespace bgw
