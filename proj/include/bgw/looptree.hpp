#pragma once

#include <cstdint>
#include <vector>

#include "bgw/scaling.hpp"
#include "bgw/tree.hpp"

namespace bgw {

inline constexpr uint32_t kNoVertex = 0xFFFFFFFFu;

// Loop(tree): every vertex u with k >= 1 children becomes a cycle of length
// k+1 through (u, child_1, ..., child_k); k = 1 gives a double edge. The
// graph is stored implicitly through the tree's sibling/parent structure, so
// each vertex has at most 4 distinct neighbor slots.
struct LooptreeGraph {
  uint32_t n = 0;
  std::vector<uint32_t> parent, first_child, last_child, prev_sib, next_sib;
  uint64_t edge_count = 0;  // with multiplicity: sum over internal u of k_u+1

  // Fills out[0..3]; returns the count (parallel edges deduplicated).
  int neighbors(uint32_t v, uint32_t out[4]) const;
};

LooptreeGraph build_looptree(const PlaneTree& tree);

// Eccentricity of the root in the loop graph.
uint64_t looptree_radius(const LooptreeGraph& loop);

struct GraftDecomposition {
  uint64_t radius_from_root = 0;
  uint64_t cycle_len = 0;         // out-degree of center + 1
  uint64_t max_graft_radius = 0;  // over components hanging off that cycle
  std::vector<uint64_t> graft_radii;  // one per cycle vertex, same order
};

// Components hanging off the cycle of center_vertex, each measured from its
// attachment point (every cycle vertex is a cut vertex, so a multi-source
// breadth-first search from the cycle yields within-component distances).
GraftDecomposition radius_and_decomposition(const LooptreeGraph& loop,
                                            uint32_t center_vertex);

struct CircleProximity {
  double cycle_len_ratio = 0;
  double max_graft_radius_ratio = 0;
  double gh_upper_bound = 0;
};

// Compare Loop(tree)/|b_n| against the circle of circumference
// cycle_len/|b_n|: collapsing every graft onto its attachment point costs
// the largest graft radius, and matching the unit-edge cycle to the
// continuum circle costs at most one edge length.
CircleProximity circle_proximity(const GraftDecomposition& decomp,
                                 const ScalingConstants& constants);

}  // namespace bgw
