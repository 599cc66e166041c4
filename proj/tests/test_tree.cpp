#include <doctest.h>

#include <bgw/errors.hpp>
#include <bgw/offspring.hpp>
#include <bgw/rng.hpp>
#include <bgw/scaling.hpp>
#include <bgw/tree.hpp>
#include <bgw/walk.hpp>

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <utility>
#include <vector>

using namespace bgw;

namespace {

OffspringLaw toy() { return OffspringLaw::head_only({0.5, 0.1, 0.3, 0.1}); }

WalkPath path_of(std::vector<int64_t> inc) {
  WalkPath p;
  p.w.assign(1, 0);
  for (int64_t x : inc) p.w.push_back(p.w.back() + x);
  return p;
}

// Depth of every vertex, straight off the child-count stack discipline.
std::vector<uint64_t> brute_depths(const PlaneTree& t) {
  std::vector<uint64_t> depths(t.size(), 0);
  std::vector<std::pair<uint64_t, uint64_t>> st;  // remaining children, depth
  for (uint64_t i = 0; i < t.size(); ++i) {
    uint64_t d = 0;
    if (i > 0) {
      while (st.back().first == 0) st.pop_back();
      d = st.back().second + 1;
      --st.back().first;
    }
    depths[i] = d;
    st.emplace_back(t.child_counts[i], d);
  }
  return depths;
}

}  // namespace

TEST_CASE("stats of hand-built trees") {
  SUBCASE("single vertex") {
    PlaneTree t{{0}};
    TreeStats s = tree_stats(t);
    CHECK(s.size == 1);
    CHECK(s.delta0 == 0);
    CHECK(s.delta1 == 0);
    CHECK(s.u_star == 0);
    CHECK(s.h_star == 0);
    REQUIRE(s.has_height);
    CHECK(s.height == 0);
  }
  SUBCASE("path of three vertices") {
    PlaneTree t{{1, 1, 0}};
    TreeStats s = tree_stats(t);
    CHECK(s.delta0 == 1);
    CHECK(s.delta1 == 1);
    CHECK(s.u_star == 0);  // ties resolve to the first in depth-first order
    CHECK(s.h_star == 0);
    CHECK(s.height == 2);
  }
  SUBCASE("star") {
    PlaneTree t{{3, 0, 0, 0}};
    TreeStats s = tree_stats(t);
    CHECK(s.delta0 == 3);
    CHECK(s.delta1 == 0);
    CHECK(s.u_star == 0);
    CHECK(s.height == 1);
  }
  SUBCASE("asymmetric, max degree away from the root") {
    PlaneTree t{{2, 3, 0, 0, 0, 1, 0}};
    TreeStats s = tree_stats(t);
    CHECK(s.size == 7);
    CHECK(s.delta0 == 3);
    CHECK(s.delta1 == 2);
    CHECK(s.u_star == 1);
    CHECK(s.h_star == 1);
    CHECK(s.height == 2);
  }
  SUBCASE("height can be skipped") {
    TreeStats s = tree_stats(PlaneTree{{2, 0, 0}}, false);
    CHECK_FALSE(s.has_height);
    CHECK(s.delta0 == 2);
  }
}

TEST_CASE("decode rejects non-excursions") {
  // Dips below zero before the end.
  CHECK_THROWS_AS(decode_lukasiewicz(path_of({-1, 0})), InputError);
  // Ends at 0, not -1.
  CHECK_THROWS_AS(decode_lukasiewicz(path_of({1, -1, 0})), InputError);
  // A step below -1 can't be a child count.
  CHECK_THROWS_AS(decode_lukasiewicz(path_of({2, -3, 0})), InputError);
  // Empty path carries no tree.
  CHECK_THROWS_AS(decode_lukasiewicz(path_of({})), InputError);
}

TEST_CASE("decode of a hand excursion") {
  PlaneTree t = decode_lukasiewicz(path_of({2, -1, -1, 0, -1}));
  REQUIRE(t.child_counts == std::vector<uint64_t>({3, 0, 0, 1, 0}));
  CHECK(encode_lukasiewicz(t).w == path_of({2, -1, -1, 0, -1}).w);
}

TEST_CASE("stats agree between tree and excursion forms") {
  OffspringLaw law = toy();
  Rng rng(4242);
  for (int rep = 0; rep < 3000; ++rep) {
    uint64_t n = 1 + rng.below(60);
    PlaneTree t = sample_tree_exact_n(law, n, rng);
    WalkPath e = encode_lukasiewicz(t);
    for (bool with_height : {false, true}) {
      TreeStats a = tree_stats(t, with_height);
      TreeStats b = stats_from_excursion(e, with_height);
      CHECK(a.size == b.size);
      CHECK(a.delta0 == b.delta0);
      CHECK(a.delta1 == b.delta1);
      CHECK(a.u_star == b.u_star);
      CHECK(a.h_star == b.h_star);
      CHECK(a.has_height == b.has_height);
      if (with_height) CHECK(a.height == b.height);
    }
  }
}

TEST_CASE("stats match a brute-force recomputation") {
  OffspringLaw law = toy();
  Rng rng(555);
  for (int rep = 0; rep < 2000; ++rep) {
    uint64_t n = 1 + rng.below(50);
    PlaneTree t = sample_tree_exact_n(law, n, rng);
    REQUIRE(t.size() == n);
    uint64_t total = 0;
    for (uint64_t c : t.child_counts) total += c;
    REQUIRE(total == n - 1);  // every non-root vertex is someone's child

    std::vector<uint64_t> sorted = t.child_counts;
    std::sort(sorted.begin(), sorted.end(), std::greater<uint64_t>());
    uint64_t d0 = sorted[0];
    uint64_t d1 = n > 1 ? sorted[1] : 0;
    uint64_t us = 0;
    while (t.child_counts[us] != d0) ++us;
    std::vector<uint64_t> depths = brute_depths(t);

    TreeStats s = tree_stats(t);
    CHECK(s.delta0 == d0);
    CHECK(s.delta1 == d1);
    CHECK(s.u_star == us);
    CHECK(s.h_star == depths[us]);
    CHECK(s.height == *std::max_element(depths.begin(), depths.end()));

    std::vector<uint64_t> top = top_degrees(t, 3);
    std::vector<uint64_t> top_e = top_degrees_from_excursion(encode_lukasiewicz(t), 3);
    REQUIRE(top == top_e);
    for (size_t i = 0; i < top.size() && i < sorted.size(); ++i)
      CHECK(top[i] == sorted[i]);
  }
}

TEST_CASE("free draws reproduce the smallest tree probabilities") {
  OffspringLaw law = toy();
  Rng rng(90210);
  const int reps = 5000;
  int size1 = 0, size2 = 0;
  for (int rep = 0; rep < reps; ++rep) {
    // A critical tree occasionally outgrows the step cap; that draw is a
    // legitimate huge tree, certainly not of size 1 or 2.
    try {
      PlaneTree t = sample_bgw_free(law, rng);
      REQUIRE(t.size() >= 1);
      if (t.size() == 1) ++size1;
      if (t.size() == 2) ++size2;
    } catch (const BudgetError&) {
    }
  }
  // P(size 1) = p0 = 0.5; P(size 2) = p1 p0 = 0.05. Five-sigma gates.
  double f1 = size1 / (double)reps;
  double f2 = size2 / (double)reps;
  CHECK(std::abs(f1 - 0.5) < 5 * std::sqrt(0.25 / reps));
  CHECK(std::abs(f2 - 0.05) < 5 * std::sqrt(0.05 * 0.95 / reps));
}

TEST_CASE("exact-size draws are deterministic and sized") {
  OffspringLaw law = toy();
  uint64_t attempts = 0;
  Rng a(31337);
  PlaneTree t1 = sample_tree_exact_n(law, 40, a, 4000000000ull, &attempts);
  REQUIRE(t1.size() == 40);
  CHECK(attempts >= 1);
  Rng b(31337);
  PlaneTree t2 = sample_tree_exact_n(law, 40, b);
  CHECK(t1.child_counts == t2.child_counts);

  Rng c(1);
  CHECK_THROWS_AS(sample_tree_exact_n(law, 64, c, 10), BudgetError);
}

TEST_CASE("local coupling draws have the requested size") {
  OffspringLaw law = toy();
  Rng rng(2718);
  uint64_t retries = 0;
  for (int rep = 0; rep < 200; ++rep) {
    PlaneTree t = sample_tree_approx_Zn(law, 25, rng, &retries);
    CHECK(t.size() == 25);
    uint64_t total = 0;
    for (uint64_t ch : t.child_counts) total += ch;
    CHECK(total == 24);
  }
}

TEST_CASE("tail draws reach the requested size floor") {
  SUBCASE("rejection strategy, light-tail law") {
    OffspringLaw law = toy();
    StepLaw step(law);
    ScalingConstants sc = compute_constants(step, 30);
    Rng rng(11);
    // The per-draw step cap turns the unbounded-size tail into a documented
    // BudgetError; with a generous cap that stays rare.
    int ok = 0;
    for (int rep = 0; rep < 50; ++rep) {
      try {
        PlaneTree t = sample_tree_tail(law, sc, 30, rng,
                                       TailTreeStrategy::rejection,
                                       uint64_t{1} << 16);
        CHECK(t.size() >= 30);
        ++ok;
      } catch (const BudgetError&) {
      }
    }
    CHECK(ok >= 40);
  }
  SUBCASE("big-jump strategy, heavy-tail law") {
    OffspringLaw law = OffspringLaw::critical_tail_law(1.0 / 3.0, 3, 1e-10);
    StepLaw step(law);
    ScalingConstants sc = compute_constants(step, 300);
    Rng rng(12);
    for (int rep = 0; rep < 20; ++rep) {
      PlaneTree t = sample_tree_tail(law, sc, 300, rng, TailTreeStrategy::vecZ);
      CHECK(t.size() >= 300);
      uint64_t total = 0;
      for (uint64_t ch : t.child_counts) total += ch;
      CHECK(total == t.size() - 1);
    }
  }
}
