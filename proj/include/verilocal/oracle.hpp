#pragma once

// Brute-force reference for small one-dimensional instances. Every vertex of
// the piecewise-linear objective fits |V|-1 edges exactly along a spanning
// tree, so screening all tree embeddings yields the exact optimum and every
// corner of the optimal set. Nothing here touches the simplex code.

#include <cstddef>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "verilocal/error.hpp"
#include "verilocal/graph.hpp"
#include "verilocal/rational.hpp"

namespace verilocal::oracle {

struct TreeEmbedding {
  std::vector<std::size_t> tree;  // 0-based edge indices
  std::vector<Rational> x;        // per node, x[0] = 0
};

struct OracleResult {
  Rational cost;
  std::vector<std::vector<Rational>> minimizers;  // distinct, sorted
  std::size_t trees = 0;
};

constexpr int kDefaultNodeCap = 8;

namespace detail {

struct SmallUnionFind {
  std::vector<int> parent;

  explicit SmallUnionFind(int n) : parent(n) {
    for (int k = 0; k < n; ++k) parent[k] = k;
  }
  int find(int a) const {
    while (parent[a] != a) a = parent[a];
    return a;
  }
};

inline bool can_still_span(const MeasurementGraph& g, SmallUnionFind uf, std::size_t from) {
  int roots = 0;
  for (int v = 0; v < g.num_nodes; ++v) roots += uf.find(v) == v;
  for (std::size_t e = from; e < g.num_edges() && roots > 1; ++e) {
    const int a = uf.find(g.edges[e].i - 1);
    const int b = uf.find(g.edges[e].j - 1);
    if (a != b) {
      uf.parent[b] = a;
      --roots;
    }
  }
  return roots == 1;
}

inline void grow(const MeasurementGraph& g, std::size_t next, const SmallUnionFind& uf, int merged,
                 std::vector<std::size_t>& chosen,
                 const std::function<void(const std::vector<std::size_t>&)>& visit) {
  if (merged == g.num_nodes - 1) {
    visit(chosen);
    return;
  }
  if (next == g.num_edges() || !can_still_span(g, uf, next)) return;
  const int a = uf.find(g.edges[next].i - 1);
  const int b = uf.find(g.edges[next].j - 1);
  if (a != b) {  // contract
    SmallUnionFind joined = uf;
    joined.parent[b] = a;
    chosen.push_back(next);
    grow(g, next + 1, joined, merged + 1, chosen, visit);
    chosen.pop_back();
  }
  grow(g, next + 1, uf, merged, chosen, visit);  // delete
}

inline Rational residual_sum(const MeasurementGraph& g, const std::vector<std::vector<Rational>>& eps,
                             const std::vector<Rational>& x) {
  Rational total = 0;
  Rational r;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    r = x[g.edges[e].j - 1] - x[g.edges[e].i - 1] - eps[e][0];
    if (r < 0) r = -r;
    total += r;
  }
  return total;
}

}  // namespace detail

/// Calls visit once per spanning tree of the undirected skeleton.
inline void for_each_spanning_tree(const MeasurementGraph& g,
                                   const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> chosen;
  detail::grow(g, 0, detail::SmallUnionFind(g.num_nodes), 0, chosen, visit);
}

/// Embedding that fits every tree edge exactly, anchored at x_1 = 0.
inline TreeEmbedding embed_tree(const ProblemInstance& inst, const std::vector<std::size_t>& tree) {
  const auto& g = inst.graph;
  TreeEmbedding out{tree, std::vector<Rational>(static_cast<std::size_t>(g.num_nodes))};
  std::vector<bool> placed(static_cast<std::size_t>(g.num_nodes), false);
  placed[0] = true;
  out.x[0] = 0;
  for (int round = 1; round < g.num_nodes; ++round) {
    for (const auto e : tree) {
      const int i = g.edges[e].i - 1;
      const int j = g.edges[e].j - 1;
      if (placed[i] && !placed[j]) {
        out.x[j] = out.x[i] + inst.epsilon[e][0];
        placed[j] = true;
      } else if (placed[j] && !placed[i]) {
        out.x[i] = out.x[j] - inst.epsilon[e][0];
        placed[i] = true;
      }
    }
  }
  return out;
}

inline OracleResult oracle_solve(const ProblemInstance& inst, int node_cap = kDefaultNodeCap) {
  if (inst.dim != 1) throw Error(ErrorCode::DimensionMismatch, "oracle expects a 1-D instance");
  if (inst.graph.num_nodes > node_cap) {
    throw Error(ErrorCode::TooLarge, std::to_string(inst.graph.num_nodes) +
                                         " nodes exceed oracle cap " + std::to_string(node_cap));
  }
  OracleResult out;
  bool first = true;
  std::set<std::vector<Rational>> best;
  for_each_spanning_tree(inst.graph, [&](const std::vector<std::size_t>& tree) {
    ++out.trees;
    auto emb = embed_tree(inst, tree);
    const Rational cost = detail::residual_sum(inst.graph, inst.epsilon, emb.x);
    if (first || cost < out.cost) {
      first = false;
      out.cost = cost;
      best.clear();
    }
    if (cost == out.cost) best.insert(std::move(emb.x));
  });
  if (inst.graph.num_nodes == 1) {  // no edges to span
    out.cost = detail::residual_sum(inst.graph, inst.epsilon, {Rational(0)});
    best.insert({Rational(0)});
  }
  out.minimizers.assign(best.begin(), best.end());
  return out;
}

/// 1 iff the origin attains the brute-force optimum.
inline int oracle_ver(const ProblemInstance& inst, int node_cap = kDefaultNodeCap) {
  const auto result = oracle_solve(inst, node_cap);
  std::vector<Rational> origin(static_cast<std::size_t>(inst.graph.num_nodes), Rational(0));
  return detail::residual_sum(inst.graph, inst.epsilon, origin) == result.cost ? 1 : 0;
}

}  // namespace verilocal::oracle
