#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "verilocal/corners.hpp"
#include "verilocal/error.hpp"
#include "verilocal/graph.hpp"
#include "verilocal/lp.hpp"
#include "verilocal/outlier_model.hpp"
#include "verilocal/parallel.hpp"
#include "verilocal/rational.hpp"

namespace verilocal {

/// 1 iff the origin is optimal for the support realized at unit magnitude.
inline int ver(const MeasurementGraph& g, const SignedOutlierSupport& support) {
  const auto inst = realize_support(g, support);
  const auto result = solve(inst);
  return result.solution.cost == Rational(static_cast<unsigned long>(support.size())) ? 1 : 0;
}

struct SupportVerdict {
  bool verifiable = false;
  bool uniquely_verifiable = false;
};

/// Verdict for one support; uniqueness is checked only when the origin is optimal.
inline SupportVerdict evaluate_support(const MeasurementGraph& g, const SignedOutlierSupport& support,
                                       bool check_uniqueness = true) {
  const auto inst = realize_support(g, support);
  const auto result = solve(inst);
  SupportVerdict v;
  v.verifiable = result.solution.cost == Rational(static_cast<unsigned long>(support.size()));
  if (v.verifiable && check_uniqueness) v.uniquely_verifiable = unique_at_origin(inst, result.tableau);
  return v;
}

inline Rational support_probability(const OutlierModel& model, const SignedOutlierSupport& support) {
  const std::size_t m = model.p_plus.size();
  std::vector<int> sign(m, 0);
  for (const auto& entry : support.entries) {
    if (entry.edge >= m || sign[entry.edge] != 0) {
      throw Error(ErrorCode::BadSupport, "support entry for edge " + std::to_string(entry.edge + 1));
    }
    sign[entry.edge] = entry.sign == Sign::Plus ? 1 : -1;
  }
  Rational p = 1;
  for (std::size_t e = 0; e < m; ++e) {
    if (sign[e] > 0) {
      p *= model.p_plus[e];
    } else if (sign[e] < 0) {
      p *= model.p_minus[e];
    } else {
      p *= 1 - model.p_plus[e] - model.p_minus[e];
    }
  }
  return p;
}

struct CensusRow {
  std::size_t k = 0;
  std::uint64_t total = 0;
  std::uint64_t verifiable = 0;
  std::uint64_t uniquely_verifiable = 0;
};

struct SupportCensus {
  std::vector<CensusRow> rows;  // rows[k] for k = 0..|E|
};

/// p_Ver(p) = sum_k coeffs[k] (p/2)^k (1-p)^(|E|-k) under p+ = p- = p/2.
struct PverPolynomial {
  std::size_t num_edges = 0;
  std::vector<std::uint64_t> coeffs;

  Rational evaluate(const Rational& p) const {
    Rational total = 0;
    const Rational half = p / 2;
    const Rational rest = 1 - p;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      Rational term = static_cast<unsigned long>(coeffs[k]);
      for (std::size_t a = 0; a < k; ++a) term *= half;
      for (std::size_t b = k; b < num_edges; ++b) term *= rest;
      total += term;
    }
    return total;
  }
};

inline PverPolynomial polynomial_from(const SupportCensus& census) {
  PverPolynomial poly;
  poly.num_edges = census.rows.empty() ? 0 : census.rows.size() - 1;
  for (const auto& row : census.rows) poly.coeffs.push_back(row.verifiable);
  return poly;
}

/// Signed support number `index` in base 3: digit 0 clean, 1 positive, 2 negative.
inline SignedOutlierSupport decode_support(std::uint64_t index, std::size_t num_edges) {
  SignedOutlierSupport s;
  for (std::size_t e = 0; e < num_edges; ++e) {
    const auto digit = index % 3;
    index /= 3;
    if (digit == 1) s.entries.push_back({e, Sign::Plus});
    if (digit == 2) s.entries.push_back({e, Sign::Minus});
  }
  return s;
}

struct ExactOptions {
  std::uint64_t budget = 1'594'323;  // 3^13 supports
  unsigned threads = 0;
  bool uniqueness = true;
};

struct ExactResult {
  Rational p_ver;
  SupportCensus census;
  std::optional<PverPolynomial> polynomial;  // only for the symmetric homogeneous model
};

inline std::uint64_t support_count(std::size_t num_edges, std::uint64_t budget) {
  std::uint64_t n = 1;
  for (std::size_t e = 0; e < num_edges; ++e) {
    if (n > budget / 3) {
      throw Error(ErrorCode::BudgetExceeded, "3^" + std::to_string(num_edges) +
                                                 " supports exceed budget " + std::to_string(budget) +
                                                 "; use Monte Carlo");
    }
    n *= 3;
  }
  if (n > budget) {
    throw Error(ErrorCode::BudgetExceeded, std::to_string(n) + " supports exceed budget " +
                                               std::to_string(budget) + "; use Monte Carlo");
  }
  return n;
}

namespace detail {

struct ExactAccumulator {
  std::vector<CensusRow> rows;
  Rational p_ver = 0;
};

inline ExactResult enumerate_supports(const MeasurementGraph& g, const OutlierModel* model,
                                      const ExactOptions& options) {
  validate_graph(g);
  if (model) validate_model(*model, g.num_edges());
  const std::size_t m = g.num_edges();
  const std::uint64_t n = support_count(m, options.budget);

  ExactAccumulator init;
  init.rows.resize(m + 1);
  auto accs = parallel_reduce_chunks(
      n, resolve_threads(options.threads), init,
      [&](std::uint64_t begin, std::uint64_t end, ExactAccumulator& acc) {
        for (std::uint64_t idx = begin; idx < end; ++idx) {
          const auto support = decode_support(idx, m);
          const auto verdict = evaluate_support(g, support, options.uniqueness);
          auto& row = acc.rows[support.size()];
          ++row.total;
          if (verdict.verifiable) {
            ++row.verifiable;
            if (model) acc.p_ver += support_probability(*model, support);
          }
          if (verdict.uniquely_verifiable) ++row.uniquely_verifiable;
        }
      },
      64);

  ExactResult out;
  out.p_ver = 0;
  out.census.rows.resize(m + 1);
  for (std::size_t k = 0; k <= m; ++k) out.census.rows[k].k = k;
  for (const auto& acc : accs) {
    out.p_ver += acc.p_ver;
    for (std::size_t k = 0; k <= m; ++k) {
      out.census.rows[k].total += acc.rows[k].total;
      out.census.rows[k].verifiable += acc.rows[k].verifiable;
      out.census.rows[k].uniquely_verifiable += acc.rows[k].uniquely_verifiable;
    }
  }
  return out;
}

}  // namespace detail

/// Model-free census of all 3^|E| signed supports, grouped by cardinality.
inline SupportCensus support_census(const MeasurementGraph& g, const ExactOptions& options = {}) {
  return detail::enumerate_supports(g, nullptr, options).census;
}

/**
 * Visits every signed support once. p_Ver is the probability-weighted count of
 * verifiable supports; the polynomial is attached when p+ = p- on every edge.
 */
inline ExactResult exact_p_ver(const MeasurementGraph& g, const OutlierModel& model,
                               const ExactOptions& options = {}) {
  auto out = detail::enumerate_supports(g, &model, options);
  if (model.is_symmetric_homogeneous()) out.polynomial = polynomial_from(out.census);
  return out;
}

struct MonteCarloResult {
  double estimate = 0;
  double half_width = 0;  // 95% normal-approximation interval
  std::uint64_t samples = 0;
  std::uint64_t verifiable = 0;
};

/// Draws signed supports only; magnitudes do not affect the verdict.
inline SignedOutlierSupport sample_support(const OutlierModel& model, std::uint64_t seed,
                                           std::uint64_t index) {
  auto rng = detail::stream_for(seed, index);
  SignedOutlierSupport s;
  for (std::size_t e = 0; e < model.p_plus.size(); ++e) {
    const int sg = detail::draw_sign(model.p_plus[e].get_d(), model.p_minus[e].get_d(), rng);
    if (sg > 0) s.entries.push_back({e, Sign::Plus});
    if (sg < 0) s.entries.push_back({e, Sign::Minus});
  }
  return s;
}

inline MonteCarloResult monte_carlo_p_ver(const MeasurementGraph& g, const OutlierModel& model,
                                          std::uint64_t samples, std::uint64_t seed,
                                          unsigned threads = 0) {
  validate_graph(g);
  validate_model(model, g.num_edges());
  if (samples < 1) throw Error(ErrorCode::InvalidModel, "need at least one sample");
  auto counts = parallel_reduce_chunks(
      samples, resolve_threads(threads), std::uint64_t{0},
      [&](std::uint64_t begin, std::uint64_t end, std::uint64_t& hits) {
        for (std::uint64_t idx = begin; idx < end; ++idx) hits += ver(g, sample_support(model, seed, idx));
      });
  MonteCarloResult out;
  out.samples = samples;
  for (const auto c : counts) out.verifiable += c;
  out.estimate = static_cast<double>(out.verifiable) / static_cast<double>(samples);
  out.half_width = 1.96 * std::sqrt(out.estimate * (1 - out.estimate) / static_cast<double>(samples));
  return out;
}

}  // namespace verilocal
