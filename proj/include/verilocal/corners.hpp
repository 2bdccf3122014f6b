#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "verilocal/error.hpp"
#include "verilocal/graph.hpp"
#include "verilocal/lp.hpp"
#include "verilocal/rational.hpp"

namespace verilocal {

enum class Classification { UniquelyVerifiable, Verifiable, NonVerifiable };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::UniquelyVerifiable: return "UniquelyVerifiable";
    case Classification::Verifiable: return "Verifiable";
    case Classification::NonVerifiable: return "NonVerifiable";
  }
  return "?";
}

inline bool is_verifiable(Classification c) { return c != Classification::NonVerifiable; }

struct Corner {
  std::vector<Rational> x;           // per node, x[0] = 0
  std::vector<Rational> edge_costs;  // Z_e = |x_j - x_i - eps_e|
  std::vector<std::size_t> basis_key;

  bool is_origin() const {
    return std::all_of(x.begin(), x.end(), [](const Rational& v) { return sgn(v) == 0; });
  }
};

struct CornerSet {
  MeasurementGraph graph;
  std::vector<Corner> corners;
  Classification classification = Classification::NonVerifiable;
  Rational optimal_cost;
  Rational origin_cost;
  std::size_t steps = 0;  // corner-to-corner moves tried during the walk
};

/// Three-way verdict from the corner list and the two costs.
inline Classification classify(const CornerSet& cs) {
  if (cs.origin_cost != cs.optimal_cost) return Classification::NonVerifiable;
  if (cs.corners.size() == 1 && cs.corners.front().is_origin()) {
    return Classification::UniquelyVerifiable;
  }
  return Classification::Verifiable;
}

/**
 * Tableau for an arbitrary basis, reached from the slack basis by
 * Gauss-Jordan pivots. Throws if the columns are singular.
 */
inline Tableau tableau_for_basis(const StandardLP& lp, std::span<const std::size_t> key) {
  Tableau t = initial_tableau(lp);
  std::vector<bool> wanted(lp.cols(), false);
  for (const auto c : key) wanted.at(c) = true;
  for (const auto c : key) {
    if (t.is_basic(c)) continue;
    std::size_t row = t.rows();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      if (!wanted[t.basis()[r]] && sgn(t.at(r, c)) != 0) {
        row = r;
        break;
      }
    }
    if (row == t.rows()) throw Error(ErrorCode::NotOptimal, "requested basis is singular");
    t.pivot(row, c);
  }
  return t;
}

struct EnumerateOptions {
  // Stop as soon as a corner other than the origin is found.
  bool stop_at_nonorigin = false;
  // 0 means unlimited.
  std::size_t max_corners = 0;
};

namespace detail {

using NodeMask = std::uint64_t;
constexpr int kMaxWalkNodes = 64;

inline std::vector<Rational> residuals(const ProblemInstance& inst, const std::vector<Rational>& x) {
  std::vector<Rational> r(inst.graph.num_edges());
  for (std::size_t e = 0; e < r.size(); ++e) {
    r[e] = x[inst.graph.edges[e].j - 1] - x[inst.graph.edges[e].i - 1] - inst.epsilon[e][0];
  }
  return r;
}

/// True iff the edges with zero residual connect every node.
inline bool tight_edges_span(const MeasurementGraph& g, const std::vector<Rational>& edge_costs) {
  UnionFind uf(static_cast<std::size_t>(g.num_nodes));
  int merged = 0;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    if (sgn(edge_costs[e]) == 0 && uf.unite(g.edges[e].i - 1, g.edges[e].j - 1)) ++merged;
  }
  return merged == g.num_nodes - 1;
}

/// Adjacency bitmasks of the zero-residual subgraph.
inline std::vector<NodeMask> tight_adjacency(const MeasurementGraph& g, const std::vector<Rational>& r) {
  std::vector<NodeMask> adj(static_cast<std::size_t>(g.num_nodes), 0);
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    if (sgn(r[e]) != 0) continue;
    const int a = g.edges[e].i - 1;
    const int b = g.edges[e].j - 1;
    adj[a] |= NodeMask{1} << b;
    adj[b] |= NodeMask{1} << a;
  }
  return adj;
}

inline bool connected_within(const std::vector<NodeMask>& adj, NodeMask set) {
  if (set == 0) return false;
  NodeMask seen = set & (~set + 1);
  NodeMask frontier = seen;
  while (frontier) {
    const int v = std::countr_zero(frontier);
    frontier &= frontier - 1;
    const NodeMask fresh = adj[v] & set & ~seen;
    seen |= fresh;
    frontier |= fresh;
  }
  return seen == set;
}

/**
 * Calls visit(C) for every nonempty C not containing node 1 such that both C
 * and its complement are connected in `adj`. Connected sets are grown from
 * their lowest node, each generated once.
 */
template <class Visit>
void for_each_connected_cut(const std::vector<NodeMask>& adj, Visit&& visit) {
  const int n = static_cast<int>(adj.size());
  const NodeMask all = n == 64 ? ~NodeMask{0} : (NodeMask{1} << n) - 1;
  auto grow = [&](auto&& self, NodeMask set, NodeMask ext, NodeMask banned) -> void {
    if (connected_within(adj, all & ~set)) visit(set);
    while (ext) {
      const int v = std::countr_zero(ext);
      ext &= ext - 1;
      const NodeMask bit = NodeMask{1} << v;
      const NodeMask next = set | bit;
      self(self, next, (ext | adj[v]) & ~next & ~banned, banned | bit);
      banned |= bit;
    }
  };
  for (int s = 1; s < n; ++s) {
    const NodeMask low = (NodeMask{1} << (s + 1)) - 1;  // nodes <= s are off limits
    const NodeMask bit = NodeMask{1} << s;
    grow(grow, bit, adj[s] & ~low, low);
  }
}

/// A basis whose basic solution is the corner x; r holds its residuals.
inline std::vector<std::size_t> corner_basis(const StandardLP& lp, const MeasurementGraph& g,
                                             const std::vector<Rational>& x, const std::vector<Rational>& r) {
  std::vector<std::size_t> key;
  for (int v = 2; v <= g.num_nodes; ++v) key.push_back(sgn(x[v - 1]) < 0 ? lp.x_minus(v) : lp.x_plus(v));
  UnionFind uf(static_cast<std::size_t>(g.num_nodes));
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    if (sgn(r[e]) == 0 && uf.unite(g.edges[e].i - 1, g.edges[e].j - 1)) {
      key.push_back(lp.s_plus(e));  // tree edge: x fixed by its second row
    } else {
      key.push_back(lp.z(e));
      key.push_back(sgn(r[e]) < 0 ? lp.s_plus(e) : lp.s_minus(e));
    }
  }
  std::sort(key.begin(), key.end());
  return key;
}

struct Step {
  bool feasible = false;
  Rational length;
};

/**
 * Moving the nodes in C by sigma * t keeps the cost constant for small t iff
 * the directional derivative of the l1 cost is zero; the step ends when a
 * crossing residual that is shrinking reaches zero.
 */
inline Step step_along(const MeasurementGraph& g, const std::vector<Rational>& r, NodeMask c, int sigma) {
  Step step;
  int slope = 0;
  bool bounded = false;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const int in_i = static_cast<int>((c >> (g.edges[e].i - 1)) & 1);
    const int in_j = static_cast<int>((c >> (g.edges[e].j - 1)) & 1);
    const int change = sigma * (in_j - in_i);
    if (change == 0) continue;
    const int s = sgn(r[e]);
    if (s == 0) {
      ++slope;
      continue;
    }
    slope += s * change;
    if (s * change < 0 && (!bounded || abs(r[e]) < step.length)) {
      step.length = abs(r[e]);
      bounded = true;
    }
  }
  step.feasible = slope == 0 && bounded;
  return step;
}

inline std::vector<Rational> shifted(std::vector<Rational> x, NodeMask c, int sigma, const Rational& t) {
  for (std::size_t v = 0; v < x.size(); ++v) {
    if ((c >> v) & 1) x[v] += sigma * t;
  }
  return x;
}

/// Moves an optimal point to a corner by merging tight components one at a time.
inline std::vector<Rational> to_corner(const ProblemInstance& inst, std::vector<Rational> x) {
  const auto& g = inst.graph;
  for (;;) {
    const auto r = residuals(inst, x);
    UnionFind uf(static_cast<std::size_t>(g.num_nodes));
    int merged = 0;
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      if (sgn(r[e]) == 0 && uf.unite(g.edges[e].i - 1, g.edges[e].j - 1)) ++merged;
    }
    if (merged == g.num_nodes - 1) return x;
    // any tight component away from node 1
    NodeMask c = 0;
    int root = -1;
    for (int v = 1; v < g.num_nodes && root < 0; ++v) {
      if (uf.find(v) != uf.find(0)) root = uf.find(v);
    }
    for (int v = 0; v < g.num_nodes; ++v) {
      if (static_cast<int>(uf.find(v)) == root) c |= NodeMask{1} << v;
    }
    auto step = step_along(g, r, c, 1);
    int sigma = 1;
    if (!step.feasible) {
      step = step_along(g, r, c, -1);
      sigma = -1;
    }
    if (!step.feasible) throw Error(ErrorCode::NotOptimal, "starting point is not optimal");
    x = shifted(std::move(x), c, sigma, step.length);
  }
}

struct WalkOutcome {
  std::vector<Corner> corners;  // in discovery order
  std::size_t steps = 0;
};

/**
 * Walks the vertex graph of the optimal set from the corner `start`. At a
 * corner the zero-residual edges span the graph; every edge of the optimal
 * set leaving it shifts one side C of a cut whose two sides are each
 * connected by zero-residual edges, so trying all such cuts in both
 * directions reaches every neighbouring corner.
 */
inline WalkOutcome walk_corners(const ProblemInstance& inst, const std::vector<Rational>& start,
                                const EnumerateOptions& options) {
  const auto& g = inst.graph;
  if (g.num_nodes > kMaxWalkNodes) {
    throw Error(ErrorCode::TooLarge, "corner walk supports at most 64 nodes");
  }
  const auto lp = build_lp(inst);
  WalkOutcome out;
  std::set<std::vector<Rational>> seen{start};
  std::vector<std::vector<Rational>> stack{start};
  while (!stack.empty()) {
    const auto x = std::move(stack.back());
    stack.pop_back();
    const auto r = residuals(inst, x);
    std::vector<Rational> costs(r.size());
    for (std::size_t e = 0; e < r.size(); ++e) costs[e] = abs(r[e]);
    Corner corner{x, costs, corner_basis(lp, g, x, r)};
    const bool stop = options.stop_at_nonorigin && !corner.is_origin();
    out.corners.push_back(std::move(corner));
    if (stop) return out;
    for_each_connected_cut(tight_adjacency(g, r), [&](NodeMask c) {
      for (const int sigma : {1, -1}) {
        const auto step = step_along(g, r, c, sigma);
        if (!step.feasible) continue;
        ++out.steps;
        auto next = shifted(x, c, sigma, step.length);
        if (seen.insert(next).second) stack.push_back(std::move(next));
      }
    });
    if (options.max_corners && out.corners.size() + stack.size() > options.max_corners) {
      throw Error(ErrorCode::CapExceeded, "corner walk passed " + std::to_string(options.max_corners) + " corners");
    }
  }
  return out;
}

/// True iff some nonzero direction from x keeps the cost constant (x optimal).
inline bool can_move(const ProblemInstance& inst, const std::vector<Rational>& x) {
  const auto r = residuals(inst, x);
  if (!tight_edges_span(inst.graph, r)) return true;
  bool moved = false;
  for_each_connected_cut(tight_adjacency(inst.graph, r), [&](NodeMask c) {
    moved = moved || step_along(inst.graph, r, c, 1).feasible || step_along(inst.graph, r, c, -1).feasible;
  });
  return moved;
}

struct DfsOutcome {
  std::vector<Corner> points;  // distinct basic optimal solutions
  std::size_t bases_visited = 0;
};

/**
 * Reference search over optimal bases: from each basis, every nonbasic column
 * with zero reduced cost is pivoted in on every positive entry that attains the
 * minimum ratio. Exhaustive but exponential on degenerate instances; the
 * corner walk above is used instead and this serves as a cross-check.
 */
inline DfsOutcome walk_optimal_bases(const Tableau& start, std::size_t max_bases = 0) {
  DfsOutcome out;
  std::set<std::vector<std::size_t>> visited;
  std::set<std::vector<Rational>> seen_points;
  std::vector<Tableau> stack;
  stack.push_back(start);
  visited.insert(start.basis_key());
  const auto& lp = start.lp();
  Rational best;
  Rational ratio;
  std::vector<std::size_t> rows;
  while (!stack.empty()) {
    Tableau t = std::move(stack.back());
    stack.pop_back();
    ++out.bases_visited;
    if (seen_points.insert(t.column_values()).second) {
      const auto sol = t.primal_solution();
      out.points.push_back(Corner{sol.x, sol.Z, t.basis_key()});
    }
    if (max_bases && out.bases_visited >= max_bases && !stack.empty()) {
      throw Error(ErrorCode::CapExceeded, "basis search visited " + std::to_string(out.bases_visited) + " bases");
    }
    for (std::size_t col = 0; col < lp.cols(); ++col) {
      if (t.is_basic(col) || sgn(t.reduced_cost(col)) != 0) continue;
      rows.clear();
      for (std::size_t r = 0; r < t.rows(); ++r) {
        const Rational& a = t.at(r, col);
        if (sgn(a) <= 0) continue;
        ratio = t.basic_value(r) / a;
        if (rows.empty() || ratio < best) {
          rows.assign(1, r);
          best = ratio;
        } else if (ratio == best) {
          rows.push_back(r);
        }
      }
      for (const auto r : rows) {
        Tableau next = t;
        next.pivot(r, col);
        if (visited.insert(next.basis_key()).second) stack.push_back(std::move(next));
      }
    }
  }
  return out;
}

}  // namespace detail

/**
 * Largest (or smallest) value of x_node over the optimal set. Runs a primal
 * simplex with Bland's rule from the optimal tableau, allowing only columns of
 * zero reduced cost so every visited basis stays optimal for the l1 cost.
 */
inline Rational optimal_face_extreme(const Tableau& optimal, int node, bool maximize,
                                     std::size_t max_pivots = 200000) {
  if (node == 1) return 0;
  const auto& lp = optimal.lp();
  Tableau t = optimal;
  // minimize w'q, w = -x_node for a maximum
  std::vector<Rational> w(lp.cols(), Rational(0));
  w[lp.x_plus(node)] = maximize ? -1 : 1;
  w[lp.x_minus(node)] = maximize ? 1 : -1;
  std::vector<Rational> d = w;
  Rational value = 0;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const Rational& wb = w[t.basis()[r]];
    if (sgn(wb) == 0) continue;
    value += wb * t.basic_value(r);
    for (std::size_t c = 0; c < lp.cols(); ++c) d[c] -= wb * t.at(r, c);
  }
  Rational best;
  Rational ratio;
  for (std::size_t pivots = 0;; ++pivots) {
    std::size_t enter = lp.cols();
    for (std::size_t c = 0; c < lp.cols(); ++c) {
      if (!t.is_basic(c) && sgn(t.reduced_cost(c)) == 0 && sgn(d[c]) < 0) {
        enter = c;
        break;
      }
    }
    if (enter == lp.cols()) break;
    std::size_t leave = t.rows();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const Rational& a = t.at(r, enter);
      if (sgn(a) <= 0) continue;
      ratio = t.basic_value(r) / a;
      if (leave == t.rows() || ratio < best || (ratio == best && t.basis()[r] < t.basis()[leave])) {
        leave = r;
        best = ratio;
      }
    }
    if (leave == t.rows()) {
      throw Error(ErrorCode::InternalUnbounded, "optimal set is unbounded along " +
                                                    lp.column_labels[enter].str());
    }
    if (pivots >= max_pivots) throw Error(ErrorCode::CycleDetected, "face search did not terminate");
    t.pivot(leave, enter);
    const Rational dj = d[enter];
    value += dj * t.basic_value(leave);
    for (std::size_t c = 0; c < lp.cols(); ++c) {
      if (sgn(t.at(leave, c)) != 0) d[c] -= dj * t.at(leave, c);
    }
  }
  return maximize ? Rational(-value) : value;
}

/// True iff every coordinate is pinned to 0 across the optimal set (one LP pair per node).
inline bool optimal_set_is_origin(const Tableau& optimal) {
  const int n = optimal.lp().num_nodes;
  for (int v = 2; v <= n; ++v) {
    if (sgn(optimal_face_extreme(optimal, v, true)) != 0) return false;
    if (sgn(optimal_face_extreme(optimal, v, false)) != 0) return false;
  }
  return true;
}

/// Same question answered locally: the origin is optimal and no cut can move.
inline bool origin_is_unique_optimum(const ProblemInstance& inst) {
  if (inst.graph.num_nodes > detail::kMaxWalkNodes) {
    throw Error(ErrorCode::TooLarge, "corner walk supports at most 64 nodes");
  }
  return !detail::can_move(inst, std::vector<Rational>(static_cast<std::size_t>(inst.graph.num_nodes), Rational(0)));
}

/// A corner of the optimal set reached from the optimal point x.
inline std::vector<Rational> corner_from(const ProblemInstance& inst, std::vector<Rational> x) {
  if (inst.graph.num_nodes > detail::kMaxWalkNodes) return x;
  return detail::to_corner(inst, std::move(x));
}

/// Uniqueness of a verifiable optimum; falls back to the face LPs on very large graphs.
inline bool unique_at_origin(const ProblemInstance& inst, const Tableau& optimal) {
  if (inst.graph.num_nodes <= detail::kMaxWalkNodes) return origin_is_unique_optimum(inst);
  return optimal_set_is_origin(optimal);
}

/**
 * All corners of the optimal set of a one-dimensional instance, walking from
 * `start`, which must be an optimal point (not necessarily a corner).
 */
inline CornerSet enumerate_corners_from(const ProblemInstance& inst, const std::vector<Rational>& start,
                                        const EnumerateOptions& options = {}) {
  if (inst.dim != 1) throw Error(ErrorCode::DimensionMismatch, "corner enumeration is per dimension");
  auto walk = detail::walk_corners(inst, detail::to_corner(inst, start), options);
  CornerSet cs;
  cs.graph = inst.graph;
  cs.optimal_cost = objective_1d(inst, start);
  cs.origin_cost = origin_objective(inst);
  cs.steps = walk.steps;
  cs.corners = std::move(walk.corners);
  std::sort(cs.corners.begin(), cs.corners.end(),
            [](const Corner& a, const Corner& b) { return a.x < b.x; });
  cs.classification = classify(cs);
  return cs;
}

/// Corners starting from the optimum held in a dual simplex tableau.
inline CornerSet enumerate_corners(const ProblemInstance& inst, const Tableau& optimal,
                                   const EnumerateOptions& options = {}) {
  if (!optimal.primal_feasible() || !optimal.dual_feasible()) {
    throw Error(ErrorCode::NotOptimal, "corner enumeration needs an optimal tableau");
  }
  return enumerate_corners_from(inst, optimal.primal_solution().x, options);
}

/// Solve and enumerate in one step.
inline CornerSet analyze(const ProblemInstance& inst, const EnumerateOptions& options = {}) {
  const auto result = solve(inst);
  return enumerate_corners(inst, result.tableau, options);
}

/**
 * Product of per-dimension corner sets. The combined corners are never stored;
 * corner(index) and for_each decode a mixed-radix index on demand.
 */
class CombinedCorners {
 public:
  explicit CombinedCorners(std::vector<CornerSet> per_dim) : per_dim_(std::move(per_dim)) {
    if (per_dim_.empty()) throw Error(ErrorCode::DimensionMismatch, "no dimensions to combine");
    count_ = 1;
    bool all_unique = true;
    bool all_verifiable = true;
    for (const auto& cs : per_dim_) {
      if (!(cs.graph == per_dim_.front().graph)) {
        throw Error(ErrorCode::MixedGraphs, "corner sets come from different graphs");
      }
      count_ *= static_cast<unsigned long>(cs.corners.size());
      all_unique = all_unique && cs.classification == Classification::UniquelyVerifiable;
      all_verifiable = all_verifiable && is_verifiable(cs.classification);
    }
    classification_ = all_unique       ? Classification::UniquelyVerifiable
                      : all_verifiable ? Classification::Verifiable
                                       : Classification::NonVerifiable;
  }

  const std::vector<CornerSet>& per_dimension() const { return per_dim_; }
  int dim() const { return static_cast<int>(per_dim_.size()); }
  const mpz_class& count() const { return count_; }
  Classification classification() const { return classification_; }

  Embedding corner(mpz_class index) const {
    if (index < 0 || index >= count_) throw Error(ErrorCode::CapExceeded, "corner index out of range");
    const auto n = static_cast<std::size_t>(per_dim_.front().graph.num_nodes);
    Embedding out{dim(), std::vector<std::vector<Rational>>(n, std::vector<Rational>(per_dim_.size()))};
    for (std::size_t k = 0; k < per_dim_.size(); ++k) {
      const mpz_class radix = static_cast<unsigned long>(per_dim_[k].corners.size());
      const auto digit = mpz_class(index % radix).get_ui();
      index /= radix;
      const auto& x = per_dim_[k].corners[digit].x;
      for (std::size_t v = 0; v < n; ++v) out.positions[v][k] = x[v];
    }
    return out;
  }

  /// Visits every combined corner; throws CapExceeded up front if there are more than `cap`.
  template <class Visitor>
  void for_each(Visitor&& visit, std::size_t cap = 1'000'000) const {
    if (count_ > static_cast<unsigned long>(cap)) {
      throw Error(ErrorCode::CapExceeded,
                  count_.get_str() + " combined corners exceed cap " + std::to_string(cap));
    }
    const auto total = count_.get_ui();
    for (unsigned long idx = 0; idx < total; ++idx) visit(corner(mpz_class(idx)));
  }

  std::vector<Embedding> materialize(std::size_t cap = 1'000'000) const {
    std::vector<Embedding> out;
    for_each([&](Embedding e) { out.push_back(std::move(e)); }, cap);
    return out;
  }

 private:
  std::vector<CornerSet> per_dim_;
  mpz_class count_;
  Classification classification_ = Classification::NonVerifiable;
};

inline CombinedCorners combine_dimensions(std::vector<CornerSet> per_dim) {
  return CombinedCorners(std::move(per_dim));
}

struct Component {
  std::vector<int> nodes;          // 1-based ids, sorted
  std::vector<std::size_t> edges;  // 0-based indices of edges with both ends in the component
};

struct ComponentReport {
  std::vector<Component> components;
};

/// Connected pieces of the node set that sits at zero in every corner of every dimension.
inline ComponentReport maximal_verifiable_components(std::span<const CornerSet> per_dim,
                                                     const MeasurementGraph& g) {
  std::vector<bool> fixed(static_cast<std::size_t>(g.num_nodes), true);
  for (const auto& cs : per_dim) {
    if (!(cs.graph == g)) throw Error(ErrorCode::MixedGraphs, "corner set from another graph");
    for (const auto& c : cs.corners) {
      for (int v = 0; v < g.num_nodes; ++v) {
        if (sgn(c.x[v]) != 0) fixed[v] = false;
      }
    }
  }
  ComponentReport report;
  for (auto& nodes : connected_components(g, fixed)) {
    Component comp;
    comp.nodes = std::move(nodes);
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      const auto [i, j] = g.edges[e];
      if (std::binary_search(comp.nodes.begin(), comp.nodes.end(), i) &&
          std::binary_search(comp.nodes.begin(), comp.nodes.end(), j)) {
        comp.edges.push_back(e);
      }
    }
    report.components.push_back(std::move(comp));
  }
  return report;
}

}  // namespace verilocal
