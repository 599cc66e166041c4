#pragma once

#include <cstdint>
#include <vector>

#include "bgw/offspring.hpp"
#include "bgw/rng.hpp"
#include "bgw/scaling.hpp"
#include "bgw/walk.hpp"

namespace bgw {

// Rooted ordered tree as child counts in depth-first order.
struct PlaneTree {
  std::vector<uint64_t> child_counts;
  uint64_t size() const { return child_counts.size(); }
};

// child_counts[i] = increment[i] + 1; mutually inverse with encode.
// decode throws InputError naming the first offending index when the input
// is not an excursion (some W_i < 0 early, W_n != -1, or a step below -1).
PlaneTree decode_lukasiewicz(const WalkPath& excursion);
WalkPath encode_lukasiewicz(const PlaneTree& tree);

struct TreeStats {
  uint64_t size = 0;
  uint64_t delta0 = 0;  // largest out-degree
  uint64_t delta1 = 0;  // second largest (0 for single-vertex trees)
  uint64_t u_star = 0;  // first vertex of maximal out-degree, DFS order
  uint64_t h_star = 0;  // its depth
  uint64_t height = 0;  // only filled when with_height
  bool has_height = false;
};

// Single pass plus a bounded stack; h_star is computed twice (DFS depth and
// the backward min-record count on the path) and the two must agree.
TreeStats tree_stats(const PlaneTree& tree, bool with_height = true);
TreeStats stats_from_excursion(const WalkPath& excursion, bool with_height = true);

// The k largest out-degrees, descending.
std::vector<uint64_t> top_degrees(const PlaneTree& tree, size_t k);
std::vector<uint64_t> top_degrees_from_excursion(const WalkPath& excursion, size_t k);

// Exact BGW draw: walk until the first passage below zero (cap in steps as
// a safety net; throws BudgetError past it).
PlaneTree sample_bgw_free(const OffspringLaw& law, Rng& rng,
                          uint64_t step_cap = uint64_t{1} << 26);

// Exact draw conditioned on size = n: bridge rejection + rotation.
// rejection_budget counts attempts x steps.
PlaneTree sample_tree_exact_n(const OffspringLaw& law, uint64_t n, Rng& rng,
                              uint64_t rejection_budget = 4000000000ull,
                              uint64_t* attempts_out = nullptr);

// Local coupling draw: retry the bridge construction until it rotates to an
// excursion; retry count reported through retries_out.
PlaneTree sample_tree_approx_Zn(const OffspringLaw& law, uint64_t n, Rng& rng,
                                uint64_t* retries_out = nullptr);

// Tail-conditioned draw, size >= n.
enum class TailTreeStrategy { rejection, vecZ };
PlaneTree sample_tree_tail(const OffspringLaw& law,
                           const ScalingConstants& constants, uint64_t n,
                           Rng& rng, TailTreeStrategy strategy,
                           uint64_t step_cap = 0,
                           uint64_t rejection_budget = 4000000000ull);

}  // namespace bgw
