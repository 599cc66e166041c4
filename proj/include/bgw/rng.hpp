#pragma once

#include <cmath>
#include <cstdint>

namespace bgw {

// SplitMix64, used only to expand seeds into generator state.
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

// xoshiro256++. Each logical stream owns an independent instance; replicate k
// of a run always uses stream(master_seed, k), so results do not depend on
// how replicates are scheduled across threads.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
    // All-zero state is a fixed point; SplitMix64 cannot emit four zeros in a
    // row, but keep the guard explicit.
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  static Rng stream(uint64_t master_seed, uint64_t index) {
    return Rng(master_seed ^ (0x9e3779b97f4a7c15ull * (index + 1)));
  }

  uint64_t next() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Standard exponential; uniform() < 1 keeps the log argument positive.
  double exp1() { return -std::log1p(-uniform()); }

  // Uniform integer in [0, bound), bound >= 1. Unbiased (rejection).
  uint64_t below(uint64_t bound) {
    const uint64_t threshold = -bound % bound;
    for (;;) {
      const uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t s_[4];
};

}  // namespace bgw
