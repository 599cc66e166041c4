#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bgw/offspring.hpp"

namespace bgw {

// Law files: {"head":[...], "tail":{"family":"c_over_k2_log2k","c":..,
// "kmin":..} | null, "mean_tol": ..}. Probabilities round-trip bit-exactly
// (shortest-roundtrip decimal).
void write_law(const OffspringLaw& law, const std::string& path);
OffspringLaw read_law(const std::string& path);

// FNV-1a over the canonical serialization; logged into every output so runs
// can be traced back to the exact law file.
std::string law_hash(const OffspringLaw& law);

// One line per replicate in the tree-stats NDJSON stream.
struct TreeStatsRecord {
  uint64_t n = 0;
  uint64_t seed = 0;  // per-replicate stream seed, enough to rebuild the tree
  uint64_t size = 0;
  std::vector<uint64_t> deg;  // top out-degrees, descending (at most 32)
  uint64_t u_star = 0;
  uint64_t h_star = 0;
  uint64_t height = 0;
  std::string mode;  // sampler mode, needed to rebuild the tree
};
std::string tree_stats_to_ndjson(const std::vector<TreeStatsRecord>& records);
void write_tree_stats_ndjson(const std::vector<TreeStatsRecord>& records,
                             const std::string& path);
// Skips empty lines and '#' comment lines.
std::vector<TreeStatsRecord> read_tree_stats_ndjson(const std::string& path);

// Shortest decimal that parses back to the same double.
std::string fmt_double(double x);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace bgw
