#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "bgw/rng.hpp"

namespace bgw {

// Analytic tail family: mu(k) = c / (k^2 ln^2 k) for k >= k_min.
struct TailDescriptor {
  double c;
  uint64_t k_min;
};

// A critical offspring distribution: tabulated head on [0, K_head), optional
// analytic tail from K_head on. Immutable after construction except for the
// tail sampling table, which grows append-only behind a mutex and publishes
// entries through an atomic count (reader addresses are stable because the
// backing storage is reserved once, up front).
class OffspringLaw {
 public:
  OffspringLaw(std::vector<double> head, std::optional<TailDescriptor> tail,
               double mean_tol = 1e-10);

  OffspringLaw(OffspringLaw&&) = default;
  OffspringLaw& operator=(OffspringLaw&&) = default;

  // mu(k) = c/(k^2 ln^2 k) for k >= k_min, mu(1) = 0, mu(0) and mu(2) solved
  // from total mass 1 and mean 1. Throws InputError when the solve goes
  // negative, reporting the offending value.
  static OffspringLaw critical_tail_law(double c, uint64_t k_min,
                                        double mean_tol = 1e-10);

  // Finite-support law; validates mass and criticality.
  static OffspringLaw head_only(std::vector<double> head,
                                double mean_tol = 1e-10);

  // Boundary-weight offspring law: c = 1, k_min = smallest feasible value
  // (computed, not hardcoded).
  static OffspringLaw q_star_boundary(double mean_tol = 1e-10);

  double prob(uint64_t k) const;           // mu(k)
  double tail_from(uint64_t k) const;      // sum_{i >= k} mu(i)
  uint64_t k_head() const { return head_.size(); }
  const std::vector<double>& head() const { return head_; }
  const std::optional<TailDescriptor>& tail() const { return tail_; }
  double mean_tol() const { return mean_tol_; }

  double mass_deviation() const { return mass_dev_; }
  double mean_deviation() const { return mean_dev_; }

  // Exact inverse-CDF draw (head CDF, then cached tail partial sums, then
  // on-the-fly continuation past the table capacity).
  uint64_t sample(Rng& rng) const;

  // Draw from the conditional law (offspring | offspring >= m) by inverse
  // CDF over the head suffix and tail-sum differences; throws InputError
  // when the conditioning event has zero mass.
  uint64_t sample_at_least(uint64_t m, Rng& rng) const;

 private:
  void validate() const;

  std::vector<double> head_;
  std::vector<double> head_cdf_;     // inclusive cumulative sums
  std::vector<double> head_suffix_;  // head_suffix_[k] = sum_{i in [k, K_head)} head_[i]
  std::optional<TailDescriptor> tail_;
  double mean_tol_;
  double head_mass_ = 0.0;
  double mass_dev_ = 0.0;
  double mean_dev_ = 0.0;
  uint64_t max_head_support_ = 0;  // largest k < K_head with mu(k) > 0

  struct TailTable {
    std::mutex grow_mutex;
    // cum[i] = sum of tail terms k_min .. k_min+i. Raw buffer allocated once
    // so reader addresses stay valid while the table grows.
    std::unique_ptr<double[]> cum;
    std::atomic<size_t> committed{0};
    // Kahan state continuing the summation, valid at index `committed`;
    // guarded by grow_mutex.
    double sum = 0.0;
    double comp = 0.0;
    size_t capacity = 0;
  };
  std::unique_ptr<TailTable> table_;

  void grow_tail_table(size_t want) const;
};

// View of the Lukasiewicz step variable X = offspring - 1, supported on
// {-1, 0, 1, ...} with P(X = i) = mu(i+1) and E[X] = 0.
class StepLaw {
 public:
  explicit StepLaw(const OffspringLaw& law) : law_(&law) {}

  int64_t sample(Rng& rng) const {
    return static_cast<int64_t>(law_->sample(rng)) - 1;
  }
  double prob(int64_t i) const {
    return i < -1 ? 0.0 : law_->prob(static_cast<uint64_t>(i + 1));
  }
  // P(X >= x); exactly 1 for x <= -1.
  double tail_prob(int64_t x) const {
    return x <= -1 ? 1.0 : law_->tail_from(static_cast<uint64_t>(x + 1));
  }
  const OffspringLaw& law() const { return *law_; }

 private:
  const OffspringLaw* law_;
};

}  // namespace bgw
