#include "bgw/offspring.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bgw/errors.hpp"
#include "bgw/tail_series.hpp"

namespace bgw {

namespace {

constexpr size_t kTableInitial = size_t{1} << 14;
constexpr size_t kTableCapacity = size_t{1} << 20;

double tail_term(double c, uint64_t k) {
  const double x = static_cast<double>(k);
  const double L = std::log(x);
  return c / (x * x * L * L);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

OffspringLaw::OffspringLaw(std::vector<double> head,
                           std::optional<TailDescriptor> tail, double mean_tol)
    : head_(std::move(head)), tail_(tail), mean_tol_(mean_tol) {
  if (head_.empty()) throw InputError("offspring law: empty head");
  for (size_t k = 0; k < head_.size(); ++k) {
    if (!(head_[k] >= 0.0)) {
      throw InputError("offspring law: head entry at index " +
                       std::to_string(k) + " is negative: " + fmt(head_[k]));
    }
  }
  if (tail_) {
    if (tail_->k_min < 3) throw InputError("offspring law: k_min must be >= 3");
    if (!(tail_->c > 0.0)) throw InputError("offspring law: tail c must be positive");
    if (tail_->k_min != head_.size()) {
      throw InputError("offspring law: head length " +
                       std::to_string(head_.size()) +
                       " must equal k_min = " + std::to_string(tail_->k_min));
    }
  }

  head_cdf_.resize(head_.size());
  double acc = 0.0;
  for (size_t k = 0; k < head_.size(); ++k) {
    acc += head_[k];
    head_cdf_[k] = acc;
  }
  head_mass_ = acc;

  head_suffix_.assign(head_.size() + 1, 0.0);
  for (size_t k = head_.size(); k-- > 0;) {
    head_suffix_[k] = head_suffix_[k + 1] + head_[k];
    if (head_[k] > 0.0) max_head_support_ = std::max<uint64_t>(max_head_support_, k);
  }

  double head_mean = 0.0;
  for (size_t k = 0; k < head_.size(); ++k) head_mean += static_cast<double>(k) * head_[k];

  double tail_mass = 0.0, tail_mean = 0.0;
  if (tail_) {
    tail_mass = tail_sum_k2(tail_->c, tail_->k_min);
    tail_mean = tail_sum_k1(tail_->c, tail_->k_min);
  }
  mass_dev_ = std::fabs(head_mass_ + tail_mass - 1.0);
  mean_dev_ = std::fabs(head_mean + tail_mean - 1.0);

  validate();

  if (tail_) {
    table_ = std::make_unique<TailTable>();
    table_->capacity = kTableCapacity;
    table_->cum = std::make_unique<double[]>(kTableCapacity);
    grow_tail_table(kTableInitial);
  }
}

void OffspringLaw::validate() const {
  if (!(head_[0] > 0.0)) throw InputError("offspring law: mu(0) must be positive");
  const double m01 = head_[0] + (head_.size() > 1 ? head_[1] : 0.0);
  if (!(m01 < 1.0)) {
    throw InputError("offspring law: mu(0) + mu(1) must be below 1, got " + fmt(m01));
  }
  if (mass_dev_ > mean_tol_) {
    throw InputError("offspring law: total mass deviates from 1 by " + fmt(mass_dev_));
  }
  if (mean_dev_ > mean_tol_) {
    throw InputError("offspring law: mean deviates from 1 by " + fmt(mean_dev_));
  }
}

OffspringLaw OffspringLaw::critical_tail_law(double c, uint64_t k_min,
                                             double mean_tol) {
  if (k_min < 3) throw InputError("critical tail law: k_min must be >= 3");
  if (!(c > 0.0)) throw InputError("critical tail law: c must be positive");
  const double S = tail_sum_k2(c, k_min);
  const double M = tail_sum_k1(c, k_min);
  if (M > 1.0) {
    throw InputError("critical tail law: infeasible parameters, tail mean alone is " +
                     fmt(M) + " > 1");
  }
  const double mu2 = 0.5 * (1.0 - M);
  const double mu0 = 1.0 - S - mu2;
  if (mu0 <= 0.0) {
    throw InputError("critical tail law: infeasible parameters, solved mu(0) = " +
                     fmt(mu0) + " is not positive");
  }
  std::vector<double> head(k_min, 0.0);
  head[0] = mu0;
  head[2] = mu2;
  return OffspringLaw(std::move(head), TailDescriptor{c, k_min}, mean_tol);
}

OffspringLaw OffspringLaw::head_only(std::vector<double> head, double mean_tol) {
  return OffspringLaw(std::move(head), std::nullopt, mean_tol);
}

OffspringLaw OffspringLaw::q_star_boundary(double mean_tol) {
  for (uint64_t k_min = 3; k_min <= 64; ++k_min) {
    const double S = tail_sum_k2(1.0, k_min);
    const double M = tail_sum_k1(1.0, k_min);
    if (M > 1.0) continue;
    const double mu0 = 1.0 - S - 0.5 * (1.0 - M);
    if (mu0 <= 0.0) continue;
    return critical_tail_law(1.0, k_min, mean_tol);
  }
  throw InputError("q* boundary law: no feasible k_min up to 64");
}

double OffspringLaw::prob(uint64_t k) const {
  if (k < head_.size()) return head_[k];
  if (tail_) return tail_term(tail_->c, k);
  return 0.0;
}

double OffspringLaw::tail_from(uint64_t k) const {
  if (k < head_.size()) {
    const double tail_mass = tail_ ? tail_sum_k2(tail_->c, tail_->k_min) : 0.0;
    return head_suffix_[k] + tail_mass;
  }
  if (tail_) return tail_sum_k2(tail_->c, std::max(k, tail_->k_min));
  return 0.0;
}

void OffspringLaw::grow_tail_table(size_t want) const {
  TailTable& t = *table_;
  std::lock_guard<std::mutex> lock(t.grow_mutex);
  const size_t target = std::min(want, t.capacity);
  size_t i = t.committed.load(std::memory_order_relaxed);
  if (i >= target) return;
  double sum = t.sum, comp = t.comp;
  for (; i < target; ++i) {
    const double y = tail_term(tail_->c, tail_->k_min + i) - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
    t.cum[i] = sum;
  }
  t.sum = sum;
  t.comp = comp;
  t.committed.store(i, std::memory_order_release);
}

uint64_t OffspringLaw::sample_at_least(uint64_t m, Rng& rng) const {
  const double mass = tail_from(m);
  if (!(mass > 0.0)) {
    throw InputError("sample_at_least: conditioning event offspring >= " +
                     std::to_string(m) + " has zero mass");
  }
  double r = rng.uniform() * mass;
  for (uint64_t k = m; k < head_.size(); ++k) {
    if (r < head_[k]) return k;
    r -= head_[k];
  }
  if (!tail_) return max_head_support_;  // residual ulp of a finite law

  // Smallest k >= lo with T0(lo) - T0(k+1) > r, where T0 is the tail sum
  // of the analytic family. Evaluating the difference as a target for
  // T0(k+1) avoids cancellation at deep conditioning thresholds.
  const double c = tail_->c;
  const uint64_t lo = std::max<uint64_t>(m, tail_->k_min);
  const double target = tail_sum_k2(c, lo) - r;
  if (!(target > 0.0)) return lo;
  const auto pred = [&](uint64_t k) { return tail_sum_k2(c, k + 1) < target; };
  if (pred(lo)) return lo;
  uint64_t a = lo, step = 1;  // invariant: !pred(a)
  uint64_t b = lo + step;
  while (!pred(b) && b < (uint64_t{1} << 60)) {
    a = b;
    step *= 2;
    b = a + step;
  }
  while (b - a > 1) {
    const uint64_t mid = a + (b - a) / 2;
    (pred(mid) ? b : a) = mid;
  }
  return b;
}

uint64_t OffspringLaw::sample(Rng& rng) const {
  const double u = rng.uniform();
  if (u < head_mass_) {
    const auto it = std::upper_bound(head_cdf_.begin(), head_cdf_.end(), u);
    return static_cast<uint64_t>(it - head_cdf_.begin());
  }
  if (!tail_) return max_head_support_;  // sub-ulp mass deficit clamp

  const double r = u - head_mass_;
  TailTable& t = *table_;
  for (;;) {
    const size_t m = t.committed.load(std::memory_order_acquire);
    const double* cum = t.cum.get();
    const size_t idx = static_cast<size_t>(std::upper_bound(cum, cum + m, r) - cum);
    if (idx < m) return tail_->k_min + idx;
    if (m >= t.capacity) break;
    grow_tail_table(std::max(kTableInitial, 2 * m));
  }

  // Past the table: continue the same compensated summation term by term.
  // The handoff state is frozen once committed == capacity, so the result
  // depends only on u.
  double sum, comp;
  {
    std::lock_guard<std::mutex> lock(t.grow_mutex);
    sum = t.sum;
    comp = t.comp;
  }
  uint64_t k = tail_->k_min + t.capacity;
  const uint64_t k_cap = k + (uint64_t{1} << 28);
  for (; k < k_cap; ++k) {
    const double y = tail_term(tail_->c, k) - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
    if (sum > r) return k;
  }
  return k_cap;  // beyond-budget mass ~1e-11, inside the declared series budget
}

}  // namespace bgw
