#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "verilocal/error.hpp"
#include "verilocal/graph.hpp"
#include "verilocal/rational.hpp"

namespace verilocal {

enum class ColumnKind { XPlus, XMinus, Z, SPlus, SMinus };

struct ColumnLabel {
  ColumnKind kind;
  int index;  // node id (1-based) for x columns, edge index (0-based) otherwise

  std::string str() const {
    switch (kind) {
      case ColumnKind::XPlus: return "x+_" + std::to_string(index);
      case ColumnKind::XMinus: return "x-_" + std::to_string(index);
      case ColumnKind::Z: return "Z_" + std::to_string(index + 1);
      case ColumnKind::SPlus: return "S+_" + std::to_string(index + 1);
      case ColumnKind::SMinus: return "S-_" + std::to_string(index + 1);
    }
    return "?";
  }
};

/**
 * Standard form min c'q s.t. Aq = b, q >= 0 of the one-dimensional problem.
 *
 * Columns: x+_2..x+_n, x-_2..x-_n, Z_1..Z_m, S+_1..S+_m, S-_1..S-_m (node 1 is
 * gauge-fixed and has no columns). Row e encodes x_j - x_i - Z_e + S+_e = eps_e,
 * row m + e encodes -(x_j - x_i) - Z_e + S-_e = -eps_e.
 */
struct StandardLP {
  int num_nodes = 0;
  std::size_t num_edges = 0;
  std::vector<Rational> cost;
  std::vector<int> constraint_matrix;  // row-major, entries in {-1, 0, 1}
  std::vector<Rational> rhs;
  std::vector<ColumnLabel> column_labels;

  std::size_t rows() const { return 2 * num_edges; }
  std::size_t cols() const { return 2 * static_cast<std::size_t>(num_nodes - 1) + 3 * num_edges; }
  int a(std::size_t r, std::size_t c) const { return constraint_matrix[r * cols() + c]; }

  std::size_t x_plus(int node) const { return static_cast<std::size_t>(node - 2); }
  std::size_t x_minus(int node) const {
    return static_cast<std::size_t>(num_nodes - 1) + static_cast<std::size_t>(node - 2);
  }
  std::size_t z(std::size_t e) const { return 2 * static_cast<std::size_t>(num_nodes - 1) + e; }
  std::size_t s_plus(std::size_t e) const { return z(e) + num_edges; }
  std::size_t s_minus(std::size_t e) const { return z(e) + 2 * num_edges; }
};

inline StandardLP build_lp(const ProblemInstance& inst) {
  if (inst.dim != 1) {
    throw Error(ErrorCode::DimensionMismatch, "build_lp expects a one-dimensional instance");
  }
  StandardLP lp;
  lp.num_nodes = inst.graph.num_nodes;
  lp.num_edges = inst.graph.num_edges();
  const std::size_t m = lp.num_edges;
  const std::size_t cols = lp.cols();
  lp.cost.assign(cols, Rational(0));
  lp.constraint_matrix.assign(lp.rows() * cols, 0);
  lp.rhs.resize(lp.rows());
  lp.column_labels.reserve(cols);
  for (int v = 2; v <= lp.num_nodes; ++v) lp.column_labels.push_back({ColumnKind::XPlus, v});
  for (int v = 2; v <= lp.num_nodes; ++v) lp.column_labels.push_back({ColumnKind::XMinus, v});
  for (int kind = 0; kind < 3; ++kind) {
    for (std::size_t e = 0; e < m; ++e) {
      lp.column_labels.push_back({static_cast<ColumnKind>(static_cast<int>(ColumnKind::Z) + kind),
                                  static_cast<int>(e)});
    }
  }
  for (std::size_t e = 0; e < m; ++e) lp.cost[lp.z(e)] = 1;

  auto set = [&](std::size_t r, std::size_t c, int v) { lp.constraint_matrix[r * cols + c] = v; };
  for (std::size_t e = 0; e < m; ++e) {
    const auto [i, j] = inst.graph.edges[e];
    const std::size_t up = e;
    const std::size_t down = m + e;
    // x_j - x_i with x = x+ - x-; gauge node contributes nothing
    if (j != 1) {
      set(up, lp.x_plus(j), 1);
      set(up, lp.x_minus(j), -1);
      set(down, lp.x_plus(j), -1);
      set(down, lp.x_minus(j), 1);
    }
    if (i != 1) {
      set(up, lp.x_plus(i), -1);
      set(up, lp.x_minus(i), 1);
      set(down, lp.x_plus(i), 1);
      set(down, lp.x_minus(i), -1);
    }
    set(up, lp.z(e), -1);
    set(down, lp.z(e), -1);
    set(up, lp.s_plus(e), 1);
    set(down, lp.s_minus(e), 1);
    lp.rhs[up] = inst.epsilon[e][0];
    lp.rhs[down] = -inst.epsilon[e][0];
  }
  return lp;
}

struct PrimalSolution {
  std::vector<Rational> x;  // one per node, x[0] = 0
  std::vector<Rational> Z;
  std::vector<Rational> S_plus;
  std::vector<Rational> S_minus;
  Rational cost;
};

struct DualCertificate {
  std::vector<Rational> P_plus;
  std::vector<Rational> P_minus;
  Rational dual_value;
};

/**
 * Dense simplex tableau. Column 0 of every row holds the value of that row's
 * basic variable; the reduced-cost row is kept separately together with the
 * current objective value.
 */
class Tableau {
 public:
  explicit Tableau(std::shared_ptr<const StandardLP> lp)
      : lp_(std::move(lp)),
        rows_(lp_->rows()),
        cols_(lp_->cols()),
        width_(cols_ + 1),
        body_(rows_ * width_),
        reduced_(lp_->cost),
        objective_(0),
        basis_(rows_),
        row_of_(cols_, -1) {}

  const StandardLP& lp() const { return *lp_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  const Rational& basic_value(std::size_t r) const { return body_[r * width_]; }
  const Rational& at(std::size_t r, std::size_t c) const { return body_[r * width_ + c + 1]; }
  const Rational& reduced_cost(std::size_t c) const { return reduced_[c]; }
  const Rational& objective_value() const { return objective_; }
  const std::vector<std::size_t>& basis() const { return basis_; }
  bool is_basic(std::size_t c) const { return row_of_[c] >= 0; }
  int row_of(std::size_t c) const { return row_of_[c]; }

  bool primal_feasible() const {
    for (std::size_t r = 0; r < rows_; ++r) {
      if (sgn(basic_value(r)) < 0) return false;
    }
    return true;
  }

  bool dual_feasible() const {
    return std::none_of(reduced_.begin(), reduced_.end(), [](const Rational& v) { return sgn(v) < 0; });
  }

  /// Sorted basic column set; identifies a basis independent of row order.
  std::vector<std::size_t> basis_key() const {
    auto key = basis_;
    std::sort(key.begin(), key.end());
    return key;
  }

  /// Value of every column at the current basic solution.
  std::vector<Rational> column_values() const {
    std::vector<Rational> q(cols_, Rational(0));
    for (std::size_t r = 0; r < rows_; ++r) q[basis_[r]] = basic_value(r);
    return q;
  }

  PrimalSolution primal_solution() const {
    const auto q = column_values();
    const auto& lp = *lp_;
    PrimalSolution s;
    s.x.assign(static_cast<std::size_t>(lp.num_nodes), Rational(0));
    for (int v = 2; v <= lp.num_nodes; ++v) s.x[v - 1] = q[lp.x_plus(v)] - q[lp.x_minus(v)];
    s.Z.resize(lp.num_edges);
    s.S_plus.resize(lp.num_edges);
    s.S_minus.resize(lp.num_edges);
    for (std::size_t e = 0; e < lp.num_edges; ++e) {
      s.Z[e] = q[lp.z(e)];
      s.S_plus[e] = q[lp.s_plus(e)];
      s.S_minus[e] = q[lp.s_minus(e)];
    }
    s.cost = objective_;
    return s;
  }

  /// Brings column `col` into the basis on row `row`; the pivot element must be nonzero.
  void pivot(std::size_t row, std::size_t col) {
    Rational* prow = &body_[row * width_];
    const Rational inv = 1 / Rational(prow[col + 1]);
    nonzero_.clear();
    for (std::size_t k = 0; k < width_; ++k) {
      if (sgn(prow[k]) != 0) {
        prow[k] *= inv;
        nonzero_.push_back(k);
      }
    }
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == row) continue;
      Rational* cur = &body_[r * width_];
      if (sgn(cur[col + 1]) == 0) continue;
      factor_ = cur[col + 1];
      for (const std::size_t k : nonzero_) {
        mpq_mul(scratch_.get_mpq_t(), factor_.get_mpq_t(), prow[k].get_mpq_t());
        mpq_sub(cur[k].get_mpq_t(), cur[k].get_mpq_t(), scratch_.get_mpq_t());
      }
    }
    if (sgn(reduced_[col]) != 0) {
      factor_ = reduced_[col];
      for (const std::size_t k : nonzero_) {
        mpq_mul(scratch_.get_mpq_t(), factor_.get_mpq_t(), prow[k].get_mpq_t());
        if (k == 0) {
          mpq_add(objective_.get_mpq_t(), objective_.get_mpq_t(), scratch_.get_mpq_t());
        } else {
          mpq_sub(reduced_[k - 1].get_mpq_t(), reduced_[k - 1].get_mpq_t(), scratch_.get_mpq_t());
        }
      }
    }
    row_of_[basis_[row]] = -1;
    basis_[row] = col;
    row_of_[col] = static_cast<int>(row);
  }

 private:
  friend Tableau initial_tableau(const StandardLP& lp);

  std::shared_ptr<const StandardLP> lp_;
  std::size_t rows_;
  std::size_t cols_;
  std::size_t width_;
  std::vector<Rational> body_;
  std::vector<Rational> reduced_;
  Rational objective_;
  std::vector<std::size_t> basis_;
  std::vector<int> row_of_;
  // pivot scratch space
  std::vector<std::size_t> nonzero_;
  Rational factor_;
  Rational scratch_;
};

/// Slack basis: S+_e = eps_e, S-_e = -eps_e, reduced costs equal to c.
inline Tableau initial_tableau(const StandardLP& lp) {
  Tableau t(std::make_shared<const StandardLP>(lp));
  const std::size_t cols = lp.cols();
  for (std::size_t r = 0; r < lp.rows(); ++r) {
    t.body_[r * t.width_] = lp.rhs[r];
    for (std::size_t c = 0; c < cols; ++c) {
      const int v = lp.a(r, c);
      if (v != 0) t.body_[r * t.width_ + c + 1] = v;
    }
  }
  for (std::size_t e = 0; e < lp.num_edges; ++e) {
    t.basis_[e] = lp.s_plus(e);
    t.basis_[lp.num_edges + e] = lp.s_minus(e);
    t.row_of_[lp.s_plus(e)] = static_cast<int>(e);
    t.row_of_[lp.s_minus(e)] = static_cast<int>(lp.num_edges + e);
  }
  return t;
}

struct SolveOptions {
  std::ostream* trace = nullptr;  // one "pivot row=.. col=.. obj=.." line per pivot
  std::size_t max_pivots = 200000;
};

struct SolveResult {
  Tableau tableau;
  PrimalSolution solution;
  std::size_t pivots = 0;
  bool bland_engaged = false;
};

/**
 * Dual simplex from a dual-feasible tableau.
 *
 * Leaving row: most negative basic value, lowest row on ties. Entering column:
 * minimum ratio reduced_cost / |r| over r < 0, lowest column on ties. Once a
 * basis repeats, the leaving row switches to the negative row whose basic
 * column index is smallest (Bland), which rules out cycling.
 */
inline SolveResult dual_simplex_solve(Tableau t, const SolveOptions& options = {}) {
  if (!t.dual_feasible()) {
    throw Error(ErrorCode::NotOptimal, "dual simplex needs nonnegative reduced costs");
  }
  std::set<std::vector<std::size_t>> seen;
  seen.insert(t.basis_key());
  bool bland = false;
  std::size_t pivots = 0;
  Rational best_ratio;
  Rational ratio;
  for (;;) {
    std::size_t leave = t.rows();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      if (sgn(t.basic_value(r)) >= 0) continue;
      if (leave == t.rows()) {
        leave = r;
      } else if (bland ? t.basis()[r] < t.basis()[leave] : t.basic_value(r) < t.basic_value(leave)) {
        leave = r;
      }
    }
    if (leave == t.rows()) break;

    std::size_t enter = t.cols();
    for (std::size_t c = 0; c < t.cols(); ++c) {
      const Rational& rc = t.at(leave, c);
      if (sgn(rc) >= 0) continue;
      ratio = t.reduced_cost(c) / rc;  // <= 0; larger means smaller |ratio|
      if (enter == t.cols() || ratio > best_ratio) {
        enter = c;
        best_ratio = ratio;
      }
    }
    if (enter == t.cols()) {
      throw Error(ErrorCode::InternalUnbounded,
                  "row " + std::to_string(leave) + " has no negative entry; dual is unbounded");
    }
    t.pivot(leave, enter);
    ++pivots;
    if (options.trace) {
      *options.trace << "pivot row=" << leave << " col=" << t.lp().column_labels[enter].str()
                     << " obj=" << to_string(t.objective_value()) << '\n';
    }
    if (!seen.insert(t.basis_key()).second) bland = true;
    if (pivots >= options.max_pivots) {
      throw Error(ErrorCode::CycleDetected,
                  "no optimum after " + std::to_string(pivots) + " pivots");
    }
  }
  auto solution = t.primal_solution();
  return SolveResult{std::move(t), std::move(solution), pivots, bland};
}

inline SolveResult solve(const ProblemInstance& inst, const SolveOptions& options = {}) {
  return dual_simplex_solve(initial_tableau(build_lp(inst)), options);
}

/// Dual values recovered from the reduced costs of the slack columns.
inline DualCertificate extract_dual_certificate(const Tableau& t) {
  if (!t.primal_feasible() || !t.dual_feasible()) {
    throw Error(ErrorCode::NotOptimal, "tableau is not at a dual simplex optimum");
  }
  const auto& lp = t.lp();
  DualCertificate cert;
  cert.P_plus.resize(lp.num_edges);
  cert.P_minus.resize(lp.num_edges);
  cert.dual_value = 0;
  for (std::size_t e = 0; e < lp.num_edges; ++e) {
    cert.P_plus[e] = -t.reduced_cost(lp.s_plus(e));
    cert.P_minus[e] = -t.reduced_cost(lp.s_minus(e));
    cert.dual_value += lp.rhs[e] * cert.P_plus[e] + lp.rhs[lp.num_edges + e] * cert.P_minus[e];
  }
  return cert;
}

}  // namespace verilocal
