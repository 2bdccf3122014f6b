#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "verilocal/error.hpp"
#include "verilocal/rational.hpp"

namespace verilocal {

/// Oriented measurement (i, j); node ids are 1-based, node 1 is the gauge node.
struct Edge {
  int i = 0;
  int j = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct MeasurementGraph {
  int num_nodes = 0;
  std::vector<Edge> edges;

  std::size_t num_edges() const { return edges.size(); }

  friend bool operator==(const MeasurementGraph&, const MeasurementGraph&) = default;
};

/// Per-node positions; positions[node - 1][k].
struct Embedding {
  int dim = 1;
  std::vector<std::vector<Rational>> positions;
};

enum class Sign { Plus, Minus };

inline char to_char(Sign s) { return s == Sign::Plus ? '+' : '-'; }

struct SupportEntry {
  std::size_t edge = 0;  // 0-based edge index
  Sign sign = Sign::Plus;

  friend bool operator==(const SupportEntry&, const SupportEntry&) = default;
};

struct SignedOutlierSupport {
  std::vector<SupportEntry> entries;

  std::size_t size() const { return entries.size(); }
};

/**
 * Canonical problem: residual on edge e = (i, j) in dimension k is
 * x_j[k] - x_i[k] - epsilon[e][k], so the ground truth sits at the origin.
 */
struct ProblemInstance {
  MeasurementGraph graph;
  int dim = 1;
  std::vector<std::vector<Rational>> epsilon;  // [edge][k]

  friend bool operator==(const ProblemInstance&, const ProblemInstance&) = default;
};

/// Relative measurements t_ij, one d-vector per edge.
using Measurements = std::vector<std::vector<Rational>>;

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Connected components of the undirected skeleton restricted to `nodes` (1-based ids).
inline std::vector<std::vector<int>> connected_components(const MeasurementGraph& g,
                                                          const std::vector<bool>& keep) {
  detail::UnionFind uf(static_cast<std::size_t>(g.num_nodes));
  for (const auto& e : g.edges) {
    if (keep[e.i - 1] && keep[e.j - 1]) uf.unite(e.i - 1, e.j - 1);
  }
  std::vector<std::vector<int>> by_root(g.num_nodes);
  for (int v = 0; v < g.num_nodes; ++v) {
    if (keep[v]) by_root[uf.find(v)].push_back(v + 1);
  }
  std::vector<std::vector<int>> out;
  for (auto& comp : by_root) {
    if (!comp.empty()) out.push_back(std::move(comp));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Throws if any MeasurementGraph invariant is violated.
inline void validate_graph(const MeasurementGraph& g) {
  if (g.num_nodes < 1) throw Error(ErrorCode::BadNodeId, "graph needs at least one node");
  std::set<std::pair<int, int>> seen;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto [i, j] = g.edges[e];
    if (i < 1 || i > g.num_nodes || j < 1 || j > g.num_nodes) {
      throw Error(ErrorCode::BadNodeId, "edge " + std::to_string(e + 1) + " = (" +
                                            std::to_string(i) + "," + std::to_string(j) +
                                            ") outside 1.." + std::to_string(g.num_nodes));
    }
    if (i == j) {
      throw Error(ErrorCode::SelfLoop, "edge " + std::to_string(e + 1) + " is a self-loop on node " +
                                           std::to_string(i));
    }
    if (!seen.insert({i, j}).second) {
      throw Error(ErrorCode::DuplicateEdge, "ordered pair (" + std::to_string(i) + "," +
                                                std::to_string(j) + ") appears twice");
    }
  }
  auto comps = connected_components(g, std::vector<bool>(g.num_nodes, true));
  if (comps.size() > 1) throw DisconnectedGraph(std::move(comps));
}

inline void validate_support(const MeasurementGraph& g, const SignedOutlierSupport& s) {
  std::vector<bool> used(g.num_edges(), false);
  for (const auto& entry : s.entries) {
    if (entry.edge >= g.num_edges()) {
      throw Error(ErrorCode::BadSupport, "support refers to edge " + std::to_string(entry.edge + 1) +
                                             " but graph has " + std::to_string(g.num_edges()));
    }
    if (used[entry.edge]) {
      throw Error(ErrorCode::BadSupport,
                  "edge " + std::to_string(entry.edge + 1) + " appears twice in support");
    }
    used[entry.edge] = true;
  }
}

inline void validate_instance(const ProblemInstance& inst) {
  validate_graph(inst.graph);
  if (inst.dim < 1) throw Error(ErrorCode::DimensionMismatch, "dimension must be positive");
  if (inst.epsilon.size() != inst.graph.num_edges()) {
    throw Error(ErrorCode::DimensionMismatch, "epsilon has " + std::to_string(inst.epsilon.size()) +
                                                  " rows for " +
                                                  std::to_string(inst.graph.num_edges()) + " edges");
  }
  for (const auto& row : inst.epsilon) {
    if (row.size() != static_cast<std::size_t>(inst.dim)) {
      throw Error(ErrorCode::DimensionMismatch, "epsilon row length differs from dimension");
    }
  }
}

/// Signed support read off dimension k of an instance.
inline SignedOutlierSupport support_of(const ProblemInstance& inst, int k = 0) {
  SignedOutlierSupport s;
  for (std::size_t e = 0; e < inst.epsilon.size(); ++e) {
    const int sg = sgn(inst.epsilon[e][k]);
    if (sg != 0) s.entries.push_back({e, sg > 0 ? Sign::Plus : Sign::Minus});
  }
  return s;
}

/**
 * Moves the ground truth to the origin: epsilon = t - (x*_j - x*_i).
 */
inline ProblemInstance canonicalize(const MeasurementGraph& g, const Measurements& t,
                                    const Embedding& truth) {
  if (truth.dim < 1 || truth.positions.size() != static_cast<std::size_t>(g.num_nodes)) {
    throw Error(ErrorCode::DimensionMismatch, "ground truth must give one position per node");
  }
  if (t.size() != g.num_edges()) {
    throw Error(ErrorCode::DimensionMismatch, "one measurement per edge required");
  }
  const auto d = static_cast<std::size_t>(truth.dim);
  for (const auto& p : truth.positions) {
    if (p.size() != d) throw Error(ErrorCode::DimensionMismatch, "ragged ground-truth positions");
  }
  ProblemInstance inst{g, truth.dim, {}};
  inst.epsilon.reserve(g.num_edges());
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    if (t[e].size() != d) {
      throw Error(ErrorCode::DimensionMismatch,
                  "measurement " + std::to_string(e + 1) + " has wrong dimension");
    }
    const auto& xi = truth.positions[g.edges[e].i - 1];
    const auto& xj = truth.positions[g.edges[e].j - 1];
    std::vector<Rational> row(d);
    for (std::size_t k = 0; k < d; ++k) row[k] = t[e][k] - (xj[k] - xi[k]);
    inst.epsilon.push_back(std::move(row));
  }
  return inst;
}

inline std::vector<ProblemInstance> split_dimensions(const ProblemInstance& inst) {
  std::vector<ProblemInstance> out;
  out.reserve(inst.dim);
  for (int k = 0; k < inst.dim; ++k) {
    ProblemInstance one{inst.graph, 1, {}};
    one.epsilon.reserve(inst.epsilon.size());
    for (const auto& row : inst.epsilon) one.epsilon.push_back({row[k]});
    out.push_back(std::move(one));
  }
  return out;
}

/// One-dimensional instance with epsilon = +-magnitude on the support, 0 elsewhere.
inline ProblemInstance realize_support(const MeasurementGraph& g, const SignedOutlierSupport& s,
                                       const Rational& magnitude = Rational(1)) {
  if (magnitude <= 0) {
    throw Error(ErrorCode::NonPositiveMagnitude, "magnitude " + to_string(magnitude));
  }
  validate_support(g, s);
  ProblemInstance inst{g, 1, std::vector<std::vector<Rational>>(g.num_edges(), {Rational(0)})};
  for (const auto& entry : s.entries) {
    inst.epsilon[entry.edge][0] = entry.sign == Sign::Plus ? magnitude : Rational(-magnitude);
  }
  return inst;
}

/// Sum over edges and dimensions of |x_j - x_i - epsilon|.
inline Rational objective(const ProblemInstance& inst, const Embedding& x) {
  Rational total = 0;
  for (std::size_t e = 0; e < inst.graph.num_edges(); ++e) {
    const auto& xi = x.positions[inst.graph.edges[e].i - 1];
    const auto& xj = x.positions[inst.graph.edges[e].j - 1];
    for (int k = 0; k < inst.dim; ++k) total += abs(xj[k] - xi[k] - inst.epsilon[e][k]);
  }
  return total;
}

/// One-dimensional objective; x holds one coordinate per node (x[0] is node 1).
inline Rational objective_1d(const ProblemInstance& inst, std::span<const Rational> x) {
  Rational total = 0;
  for (std::size_t e = 0; e < inst.graph.num_edges(); ++e) {
    const auto [i, j] = inst.graph.edges[e];
    total += abs(x[j - 1] - x[i - 1] - inst.epsilon[e][0]);
  }
  return total;
}

/// Objective at the ground truth: sum of |epsilon|.
inline Rational origin_objective(const ProblemInstance& inst) {
  Rational total = 0;
  for (const auto& row : inst.epsilon) {
    for (const auto& v : row) total += abs(v);
  }
  return total;
}

}  // namespace verilocal
