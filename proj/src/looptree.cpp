#include "bgw/looptree.hpp"

#include <algorithm>
#include <cmath>

#include "bgw/errors.hpp"

namespace bgw {

int LooptreeGraph::neighbors(uint32_t v, uint32_t out[4]) const {
  int m = 0;
  auto add = [&](uint32_t u) {
    if (u == kNoVertex) return;
    for (int i = 0; i < m; ++i)
      if (out[i] == u) return;
    out[m++] = u;
  };
  // Cycle of v's own children: v touches the first and last child.
  add(first_child[v]);
  add(last_child[v]);
  // Cycle of v's parent: v touches adjacent siblings, and the parent when v
  // sits at either end of the fan.
  if (parent[v] != kNoVertex) {
    if (prev_sib[v] != kNoVertex) add(prev_sib[v]);
    else add(parent[v]);
    if (next_sib[v] != kNoVertex) add(next_sib[v]);
    else add(parent[v]);
  }
  return m;
}

LooptreeGraph build_looptree(const PlaneTree& tree) {
  uint64_t n64 = tree.size();
  if (n64 == 0) throw InputError("empty tree");
  if (n64 >= kNoVertex) throw InputError("tree too large for loop graph");
  uint32_t n = static_cast<uint32_t>(n64);

  LooptreeGraph g;
  g.n = n;
  g.parent.assign(n, kNoVertex);
  g.first_child.assign(n, kNoVertex);
  g.last_child.assign(n, kNoVertex);
  g.prev_sib.assign(n, kNoVertex);
  g.next_sib.assign(n, kNoVertex);

  struct Frame {
    uint32_t vertex;
    uint64_t remaining;
    uint32_t last_seen;
  };
  static thread_local std::vector<Frame> stack;
  stack.clear();
  for (uint32_t i = 0; i < n; ++i) {
    if (!stack.empty()) {
      Frame& top = stack.back();
      g.parent[i] = top.vertex;
      if (top.last_seen == kNoVertex) {
        g.first_child[top.vertex] = i;
      } else {
        g.prev_sib[i] = top.last_seen;
        g.next_sib[top.last_seen] = i;
      }
      g.last_child[top.vertex] = i;
      top.last_seen = i;
      --top.remaining;
    } else if (i != 0) {
      throw InputError("child counts describe a forest, not a tree");
    }
    uint64_t k = tree.child_counts[i];
    if (k > 0) {
      g.edge_count += k + 1;
      stack.push_back({i, k, kNoVertex});
    } else {
      while (!stack.empty() && stack.back().remaining == 0) stack.pop_back();
    }
  }
  if (!stack.empty()) throw InputError("child counts leave open vertices");
  return g;
}

namespace {

// Unweighted breadth-first search; dist uses kNoVertex as "unvisited".
// sources carry initial distance 0. When tags is non-null, each visited
// vertex inherits the tag of the source whose region reached it first.
void bfs(const LooptreeGraph& g, const std::vector<uint32_t>& sources,
         std::vector<uint32_t>& dist, std::vector<uint32_t>* tags) {
  dist.assign(g.n, kNoVertex);
  if (tags) tags->assign(g.n, kNoVertex);
  static thread_local std::vector<uint32_t> queue;
  queue.clear();
  for (uint32_t i = 0; i < sources.size(); ++i) {
    uint32_t s = sources[i];
    dist[s] = 0;
    if (tags) (*tags)[s] = i;
    queue.push_back(s);
  }
  uint32_t nb[4];
  for (size_t head = 0; head < queue.size(); ++head) {
    uint32_t v = queue[head];
    int m = g.neighbors(v, nb);
    for (int j = 0; j < m; ++j) {
      uint32_t u = nb[j];
      if (dist[u] != kNoVertex) continue;
      dist[u] = dist[v] + 1;
      if (tags) (*tags)[u] = (*tags)[v];
      queue.push_back(u);
    }
  }
}

}  // namespace

uint64_t looptree_radius(const LooptreeGraph& loop) {
  static thread_local std::vector<uint32_t> dist;
  bfs(loop, {0u}, dist, nullptr);
  uint32_t r = 0;
  for (uint32_t d : dist) {
    if (d == kNoVertex) throw VerifyError("loop graph is not connected");
    r = std::max(r, d);
  }
  return r;
}

GraftDecomposition radius_and_decomposition(const LooptreeGraph& loop,
                                            uint32_t center_vertex) {
  if (center_vertex >= loop.n) throw InputError("center vertex out of range");
  GraftDecomposition out;
  out.radius_from_root = looptree_radius(loop);

  std::vector<uint32_t> cycle;
  cycle.push_back(center_vertex);
  for (uint32_t c = loop.first_child[center_vertex]; c != kNoVertex;
       c = loop.next_sib[c])
    cycle.push_back(c);
  out.cycle_len = cycle.size();

  static thread_local std::vector<uint32_t> dist;
  static thread_local std::vector<uint32_t> tags;
  bfs(loop, cycle, dist, &tags);
  out.graft_radii.assign(cycle.size(), 0);
  for (uint32_t v = 0; v < loop.n; ++v) {
    uint32_t t = tags[v];
    out.graft_radii[t] = std::max(out.graft_radii[t],
                                  static_cast<uint64_t>(dist[v]));
  }
  out.max_graft_radius =
      *std::max_element(out.graft_radii.begin(), out.graft_radii.end());
  return out;
}

CircleProximity circle_proximity(const GraftDecomposition& decomp,
                                 const ScalingConstants& constants) {
  double b = std::abs(constants.b_n);
  if (!(b > 0)) throw InputError("constants carry no centering scale");
  CircleProximity p;
  p.cycle_len_ratio = static_cast<double>(decomp.cycle_len) / b;
  p.max_graft_radius_ratio = static_cast<double>(decomp.max_graft_radius) / b;
  p.gh_upper_bound = (static_cast<double>(decomp.max_graft_radius) + 1.0) / b;
  return p;
}

}  // namespace bgw
