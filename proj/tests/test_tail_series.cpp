#include <doctest.h>

#include <bgw/tail_series.hpp>

#include <cmath>
#include <cstdint>
#include <initializer_list>

using namespace bgw;

TEST_CASE("exp_int_e1 reference values") {
  // Abramowitz-Stegun table values.
  CHECK(exp_int_e1(0.5) == doctest::Approx(0.5597735948).epsilon(1e-9));
  CHECK(exp_int_e1(1.0) == doctest::Approx(0.2193839344).epsilon(1e-9));
  CHECK(exp_int_e1(2.0) == doctest::Approx(0.0489005107).epsilon(1e-9));
  CHECK(exp_int_e1(10.0) == doctest::Approx(4.15696892968532e-6).epsilon(1e-9));
  // x e^x E1(x) -> 1 from below.
  double x = 50.0;
  CHECK(x * std::exp(x) * exp_int_e1(x) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("tail sums agree with brute force partial sums") {
  // Brute-force the head of the series and bound what remains by integrals.
  auto brute_k2 = [](double c, uint64_t m, uint64_t upto) {
    double s = 0;
    for (uint64_t k = upto; k-- > m;) {
      double lk = std::log((double)k);
      s += c / ((double)k * (double)k * lk * lk);
    }
    return s;
  };
  for (uint64_t m : {2ull, 3ull, 10ull, 100ull}) {
    double full = tail_sum_k2(1.0, m);
    double head = brute_k2(1.0, m, 2000000);
    // The integral remainder past 2e6 is below 2e-7/ln^2(2e6).
    CHECK(full > head);
    CHECK(full - head < 5e-7);
  }
  // Series is decreasing in m and positive.
  CHECK(tail_sum_k2(1.0, 2) > tail_sum_k2(1.0, 3));
  CHECK(tail_sum_k2(1.0, 1000000) > 0.0);
  CHECK(tail_sum_k1(1.0, 2) > tail_sum_k1(1.0, 3));
}

TEST_CASE("tail_sum_k1 matches its integral scale") {
  // sum_{k>=m} 1/(k ln^2 k) ~ 1/ln m for large m.
  for (uint64_t m : {1000ull, 1000000ull}) {
    double s = tail_sum_k1(1.0, m);
    double approx = 1.0 / std::log((double)m);
    CHECK(s / approx == doctest::Approx(1.0).epsilon(0.01));
  }
}

TEST_CASE("integral_inv_x2_log2 closed form consistency") {
  // d/dx of -(integral) must equal 1/(x^2 ln^2 x): check by central
  // difference at a few points.
  for (double x : {10.0, 100.0, 5000.0}) {
    double h = x * 1e-5;
    double deriv = (integral_inv_x2_log2(x - h) - integral_inv_x2_log2(x + h)) / (2 * h);
    double lx = std::log(x);
    CHECK(deriv == doctest::Approx(1.0 / (x * x * lx * lx)).epsilon(1e-6));
  }
  // Tends to zero and is positive.
  CHECK(integral_inv_x2_log2(1e12) > 0.0);
  CHECK(integral_inv_x2_log2(1e12) < 1e-11);
}
