#include "bgw/walk.hpp"

#include <algorithm>
#include <cmath>

#include "bgw/errors.hpp"

namespace bgw {

void sample_walk_into(const StepLaw& law, uint64_t n, Rng& rng, WalkPath& out) {
  out.w.resize(n + 1);
  out.w[0] = 0;
  int64_t v = 0;  // accumulated offspring draws; the -1 per step is applied below
  for (uint64_t i = 0; i < n; ++i) {
    v += static_cast<int64_t>(law.law().sample(rng));
    out.w[i + 1] = v - static_cast<int64_t>(i + 1);
  }
}

WalkPath sample_walk(const StepLaw& law, uint64_t n, Rng& rng) {
  WalkPath p;
  sample_walk_into(law, n, rng, p);
  return p;
}

std::optional<uint64_t> first_time_below_zero(const WalkPath& path) {
  for (uint64_t i = 1; i < path.w.size(); ++i) {
    if (path.w[i] < 0) return i;
  }
  return std::nullopt;
}

uint64_t last_weak_ladder_epoch(const WalkPath& path) {
  int64_t best = 0;
  uint64_t at = 0;
  for (uint64_t i = 1; i < path.w.size(); ++i) {
    if (path.w[i] >= best) {
      best = path.w[i];
      at = i;
    }
  }
  return at;
}

uint64_t count_weak_ladder_epochs(const WalkPath& path) {
  int64_t best = 0;
  uint64_t count = 1;  // T_0 = 0
  for (uint64_t i = 1; i < path.w.size(); ++i) {
    if (path.w[i] >= best) {
      best = path.w[i];
      ++count;
    }
  }
  return count;
}

FluctuationMarkers fluctuation_markers(const WalkPath& path) {
  FluctuationMarkers m;
  m.ladder_epochs.push_back(0);
  int64_t best = 0;
  for (uint64_t i = 1; i < path.w.size(); ++i) {
    if (!m.zeta && path.w[i] < 0) m.zeta = i;
    if (path.w[i] >= best) {
      best = path.w[i];
      m.ladder_epochs.push_back(i);
    }
  }
  m.i_n = m.ladder_epochs.back();
  m.h_n = m.ladder_epochs.size();
  return m;
}

WalkPath time_reverse(const WalkPath& path) {
  const uint64_t n = path.n();
  WalkPath out;
  out.w.resize(n + 1);
  out.w[0] = 0;
  for (uint64_t i = 0; i < n; ++i) {
    out.w[i + 1] = out.w[i] + path.inc(n - 1 - i);
  }
  return out;
}

uint64_t vervaat_split(const WalkPath& path) {
  int64_t min_v = path.w[1];
  uint64_t at = 1;
  for (uint64_t i = 2; i < path.w.size(); ++i) {
    if (path.w[i] < min_v) {
      min_v = path.w[i];
      at = i;
    }
  }
  return at;
}

void vervaat_into(const WalkPath& path, WalkPath& out) {
  const uint64_t n = path.n();
  const uint64_t k = vervaat_split(path);
  out.w.resize(n + 1);
  const int64_t wk = path.w[k];
  // First block: increments k..n-1, so Z_j = W_{k+j} - W_k for j <= n-k.
  for (uint64_t j = 0; j <= n - k; ++j) out.w[j] = path.w[k + j] - wk;
  // Second block wraps: Z_j = (W_n - W_k) + W_{j-(n-k)}.
  const int64_t base = path.w[n] - wk;
  for (uint64_t j = n - k + 1; j <= n; ++j) out.w[j] = base + path.w[j - (n - k)];
}

WalkPath vervaat(const WalkPath& path) {
  WalkPath out;
  vervaat_into(path, out);
  return out;
}

bool is_excursion(const WalkPath& path) {
  const uint64_t n = path.n();
  if (n == 0 || path.w[n] != -1) return false;
  for (uint64_t i = 0; i < n; ++i) {
    if (path.w[i] < 0) return false;
  }
  return true;
}

void build_Z_n_into(const StepLaw& law, uint64_t n, Rng& rng, ZnSample& out) {
  static thread_local WalkPath scratch;
  sample_walk_into(law, n - 1, rng, scratch);
  const int64_t w_last = scratch.w[n - 1];
  int64_t max_inc = INT64_MIN;
  for (uint64_t i = 0; i + 1 < n; ++i) max_inc = std::max(max_inc, scratch.inc(i));
  out.forced_increment = -1 - w_last;
  out.forced_is_strict_max = max_inc < out.forced_increment;
  out.excursion = w_last <= 0;  // forced increment >= -1: cycle lemma applies
  scratch.w.push_back(-1);
  vervaat_into(scratch, out.z);
  scratch.w.pop_back();
}

ZnSample build_Z_n(const StepLaw& law, uint64_t n, Rng& rng) {
  ZnSample s;
  build_Z_n_into(law, n, rng, s);
  return s;
}

void build_vecZ_n_into(const StepLaw& law, const ScalingConstants& constants,
                       uint64_t n, Rng& rng, VecZStrategy strategy,
                       uint64_t step_cap, uint64_t rejection_budget,
                       VecZn& out) {
  if (step_cap == 0) step_cap = 128 * n;

  // Auxiliary walk: its last weak ladder epoch is the prefix length,
  // and (reversal strategy) its reversed pre-epoch block is the prefix.
  static thread_local WalkPath aux;
  sample_walk_into(law, n, rng, aux);
  const uint64_t m = last_weak_ladder_epoch(aux);

  out.prefix_len = m;
  out.jump_index = m;
  out.path.w.clear();
  out.path.w.reserve(std::min<uint64_t>(step_cap + 2, 8 * n + 2));
  out.path.w.push_back(0);

  if (strategy == VecZStrategy::reversal) {
    // Reversed block: increments x_m, x_{m-1}, ..., x_1 of the auxiliary walk.
    const int64_t top = aux.w[m];
    for (uint64_t i = 1; i <= m; ++i) out.path.w.push_back(top - aux.w[m - i]);
  } else {
    // Literal transcription: fresh prefixes until one stays >= 0 throughout.
    uint64_t spent = 0;
    for (;;) {
      bool ok = true;
      int64_t v = 0;
      out.path.w.resize(1);
      for (uint64_t i = 0; i < m; ++i) {
        v += static_cast<int64_t>(law.law().sample(rng));
        const int64_t w = v - static_cast<int64_t>(i + 1);
        out.path.w.push_back(w);
        if (w < 0) {
          ok = false;
          spent += i + 1;
          break;
        }
      }
      if (ok) break;
      if (spent > rejection_budget) {
        throw BudgetError("vecZ definitional prefix: rejection budget exceeded at length " +
                          std::to_string(m));
      }
    }
  }

  // Big jump: X conditioned on X >= ceil(|b_n|).
  const uint64_t threshold = static_cast<uint64_t>(std::ceil(-constants.b_n));
  out.jump_value =
      static_cast<int64_t>(law.law().sample_at_least(threshold + 1, rng)) - 1;
  out.path.w.push_back(out.path.w.back() + out.jump_value);

  // Free walk until the path hits -1.
  out.hit = false;
  out.hit_time = 0;
  int64_t v = out.path.w.back();
  while (out.path.w.size() <= step_cap) {
    v += law.sample(rng);
    out.path.w.push_back(v);
    if (v == -1) {
      out.hit = true;
      out.hit_time = out.path.w.size() - 1;
      break;
    }
  }
}

VecZn build_vecZ_n(const StepLaw& law, const ScalingConstants& constants,
                   uint64_t n, Rng& rng, VecZStrategy strategy,
                   uint64_t step_cap, uint64_t rejection_budget) {
  VecZn out;
  build_vecZ_n_into(law, constants, n, rng, strategy, step_cap, rejection_budget, out);
  return out;
}

}  // namespace bgw
