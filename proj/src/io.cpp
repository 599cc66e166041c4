#include "bgw/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bgw/errors.hpp"

namespace bgw {

using nlohmann::ordered_json;

std::string fmt_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw IoError("number formatting failed");
  return std::string(buf, p);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed on " + path);
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed on " + path);
}

namespace {

ordered_json law_to_json(const OffspringLaw& law) {
  ordered_json j;
  j["head"] = law.head();
  if (law.tail()) {
    ordered_json t;
    t["family"] = "c_over_k2_log2k";
    t["c"] = law.tail()->c;
    t["kmin"] = law.tail()->k_min;
    j["tail"] = t;
  } else {
    j["tail"] = nullptr;
  }
  j["mean_tol"] = law.mean_tol();
  return j;
}

}  // namespace

void write_law(const OffspringLaw& law, const std::string& path) {
  write_text_file(path, law_to_json(law).dump(2) + "\n");
}

OffspringLaw read_law(const std::string& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("law file " + path + ": " + e.what());
  }
  try {
    std::vector<double> head = j.at("head").get<std::vector<double>>();
    double mean_tol = j.at("mean_tol").get<double>();
    const auto& t = j.at("tail");
    if (t.is_null()) return OffspringLaw(std::move(head), {}, mean_tol);
    if (t.at("family").get<std::string>() != "c_over_k2_log2k")
      throw InputError("law file " + path + ": unknown tail family");
    TailDescriptor td{t.at("c").get<double>(), t.at("kmin").get<uint64_t>()};
    return OffspringLaw(std::move(head), td, mean_tol);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("law file " + path + ": " + e.what());
  }
}

std::string law_hash(const OffspringLaw& law) {
  const std::string canon = law_to_json(law).dump();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 0; i < 16; ++i) buf[i] = hex[(h >> (60 - 4 * i)) & 0xf];
  buf[16] = '\0';
  return std::string(buf);
}

std::string tree_stats_to_ndjson(const std::vector<TreeStatsRecord>& records) {
  std::ostringstream out;
  for (const auto& r : records) {
    ordered_json j;
    j["n"] = r.n;
    j["seed"] = r.seed;
    j["size"] = r.size;
    j["deg"] = r.deg;
    j["u_star"] = r.u_star;
    j["h_star"] = r.h_star;
    j["height"] = r.height;
    j["mode"] = r.mode;
    out << j.dump() << "\n";
  }
  return out.str();
}

void write_tree_stats_ndjson(const std::vector<TreeStatsRecord>& records,
                             const std::string& path) {
  write_text_file(path, tree_stats_to_ndjson(records));
}

std::vector<TreeStatsRecord> read_tree_stats_ndjson(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<TreeStatsRecord> out;
  std::string line;
  uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    try {
      ordered_json j = ordered_json::parse(line);
      TreeStatsRecord r;
      r.n = j.at("n").get<uint64_t>();
      r.seed = j.at("seed").get<uint64_t>();
      r.size = j.at("size").get<uint64_t>();
      r.deg = j.at("deg").get<std::vector<uint64_t>>();
      r.u_star = j.at("u_star").get<uint64_t>();
      r.h_star = j.at("h_star").get<uint64_t>();
      r.height = j.at("height").get<uint64_t>();
      r.mode = j.value("mode", std::string());
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace bgw
