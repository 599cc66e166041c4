#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bgw/offspring.hpp"

namespace bgw {

// Experiment families. T1..T8 check the limit laws of the conditioned tree
// functionals (T1-T3 under size = n, T4-T8 under size >= n); LADDER, IN_LAW
// and HN_EXP check the fluctuation-theory estimates on free walks;
// PATH_LOCAL / PATH_TAIL check the rescaled path profiles; DTV_ORACLE runs
// the exact enumeration comparison of the local coupling.
enum class TheoremId {
  T1, T2, T3, T4, T5, T6, T7, T8,
  LADDER, IN_LAW, HN_EXP, PATH_LOCAL, PATH_TAIL, DTV_ORACLE,
};

TheoremId theorem_from_string(const std::string& name);
const std::string& theorem_name(TheoremId id);

struct ExperimentConfig {
  TheoremId theorem = TheoremId::T1;
  std::string law_hash;          // echoed into the report
  std::vector<uint64_t> n_grid;  // strictly ascending
  uint64_t reps = 0;             // replicates per grid point
  uint64_t seed = 0;             // master seed
  std::string mode;              // sampler mode; empty = theorem default
  unsigned threads = 0;          // 0 = hardware concurrency; never in report
  // Named tolerances; defaults per theorem, overridable. Every verdict
  // references one entry by name.
  std::map<std::string, double> tolerances;
};

// A verdict value is always a deviation (smaller is better); pass means
// value <= tolerance. Trend verdicts encode the violated fraction of
// consecutive grid steps, so tolerance 0 demands full monotonicity.
struct Verdict {
  std::string name;
  std::string tolerance_name;
  double tolerance = 0;
  double value = 0;
  bool pass = false;
};

// One row per (n, replicate, functional) for plot-data export.
struct PlotRow {
  uint64_t n = 0;
  uint64_t replicate = 0;
  std::string functional;
  double value = 0;
};

struct ExperimentReport {
  std::string json;  // byte-stable serialization for fixed (config, seed)
  std::vector<Verdict> verdicts;
  bool all_pass = true;
};

// Runs the sampling plan of config.theorem over the n grid, computes the
// rescaled functionals, runs the declared tests, and assembles the report.
// Replicate-parallel with per-replicate seed streams; results do not depend
// on config.threads. Wall-clock goes to stderr, never into the report.
// Sampler errors propagate, prefixed with the replicate index. When plot is
// non-null, per-replicate functional values are appended to it.
ExperimentReport run_experiment(const OffspringLaw& law,
                                const ExperimentConfig& config,
                                std::vector<PlotRow>* plot = nullptr);

}  // namespace bgw
