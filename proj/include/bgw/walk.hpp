#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bgw/offspring.hpp"
#include "bgw/rng.hpp"
#include "bgw/scaling.hpp"

namespace bgw {

// A left-continuous random-walk path held as prefix sums: w[0] = 0, w[i]
// = x_1 + ... + x_i, with every increment >= -1 for law-generated paths
// (the forced bridge step of the local coupling may go lower).
struct WalkPath {
  std::vector<int64_t> w;

  uint64_t n() const { return w.size() - 1; }
  int64_t inc(uint64_t i) const { return w[i + 1] - w[i]; }
};

struct FluctuationMarkers {
  std::optional<uint64_t> zeta;        // first i >= 1 with W_i < 0
  std::vector<uint64_t> ladder_epochs; // weak ladder epochs including T_0 = 0
  uint64_t i_n = 0;                    // last weak ladder epoch <= n
  uint64_t h_n = 0;                    // number of weak ladder epochs <= n
};

WalkPath sample_walk(const StepLaw& law, uint64_t n, Rng& rng);
void sample_walk_into(const StepLaw& law, uint64_t n, Rng& rng, WalkPath& out);

// Full marker scan: zeta, all weak ladder epochs (record characterization:
// j is one iff W_j >= W_k for all k < j), I_n, H_n.
FluctuationMarkers fluctuation_markers(const WalkPath& path);

// Cheap single-purpose scans for hot loops.
std::optional<uint64_t> first_time_below_zero(const WalkPath& path);
uint64_t last_weak_ladder_epoch(const WalkPath& path);
uint64_t count_weak_ladder_epochs(const WalkPath& path);

// Increments read right to left; involution.
WalkPath time_reverse(const WalkPath& path);

// First argmin of (W_1, ..., W_n); the rotation point of the Vervaat
// transform. For a path summing to -1 with increments >= -1 the rotated
// path is the unique cyclic shift that is an excursion (cycle lemma).
uint64_t vervaat_split(const WalkPath& path);
WalkPath vervaat(const WalkPath& path);
void vervaat_into(const WalkPath& path, WalkPath& out);

// True iff W_i >= 0 for all i < n and W_n = -1.
bool is_excursion(const WalkPath& path);

// Local coupling: n-1 free increments, one forced increment landing the
// path at -1, then Vervaat. The result is an excursion iff W_{n-1} <= 0
// held before rotation (forced increment >= -1).
struct ZnSample {
  WalkPath z;
  bool excursion = false;
  int64_t forced_increment = 0;
  // The event driving the coupling analysis: the forced increment strictly
  // dominates every sampled one.
  bool forced_is_strict_max = false;
};
ZnSample build_Z_n(const StepLaw& law, uint64_t n, Rng& rng);
void build_Z_n_into(const StepLaw& law, uint64_t n, Rng& rng, ZnSample& out);

// Tail coupling: prefix of length I_n (from an auxiliary n-step walk)
// conditioned to stay >= 0, one jump drawn from X | X >= ceil(|b_n|), then
// a free walk until the path first hits -1 (or the step cap).
enum class VecZStrategy { reversal, definitional };

struct VecZn {
  WalkPath path;
  uint64_t prefix_len = 0;   // I_n of the auxiliary walk
  uint64_t jump_index = 0;   // == prefix_len: 0-based index of the big jump
  int64_t jump_value = 0;
  bool hit = false;          // reached -1 before the step cap
  uint64_t hit_time = 0;     // first i >= 1 with W_i = -1, valid when hit
};

// step_cap = 0 means 128 * n. The definitional strategy resamples fresh
// prefixes until one stays nonnegative and throws BudgetError once
// attempts x steps exceed rejection_budget.
VecZn build_vecZ_n(const StepLaw& law, const ScalingConstants& constants,
                   uint64_t n, Rng& rng,
                   VecZStrategy strategy = VecZStrategy::reversal,
                   uint64_t step_cap = 0,
                   uint64_t rejection_budget = 1000000000ull);
void build_vecZ_n_into(const StepLaw& law, const ScalingConstants& constants,
                       uint64_t n, Rng& rng, VecZStrategy strategy,
                       uint64_t step_cap, uint64_t rejection_budget,
                       VecZn& out);

}  // namespace bgw
