#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "verilocal/error.hpp"
#include "verilocal/graph.hpp"
#include "verilocal/rational.hpp"

namespace verilocal {

struct Interval {
  Rational lo;
  Rational hi;
};

/// Per-edge outlier probabilities and the magnitude ranges draws come from.
struct OutlierModel {
  std::vector<Rational> p_plus;
  std::vector<Rational> p_minus;
  Interval magnitude_range_neg{Rational(-10), Rational(-1)};
  Interval magnitude_range_pos{Rational(1), Rational(10)};

  static OutlierModel homogeneous(std::size_t num_edges, const Rational& p_plus,
                                  const Rational& p_minus) {
    return OutlierModel{std::vector<Rational>(num_edges, p_plus),
                        std::vector<Rational>(num_edges, p_minus)};
  }

  /// p+ = p- = p/2 on every edge.
  static OutlierModel symmetric(std::size_t num_edges, const Rational& p) {
    return homogeneous(num_edges, p / 2, p / 2);
  }

  bool is_symmetric_homogeneous() const {
    for (std::size_t e = 0; e < p_plus.size(); ++e) {
      if (p_plus[e] != p_plus[0] || p_minus[e] != p_plus[0]) return false;
    }
    return true;
  }
};

inline void validate_model(const OutlierModel& m, std::size_t num_edges) {
  if (m.p_plus.size() != num_edges || m.p_minus.size() != num_edges) {
    throw Error(ErrorCode::InvalidModel, "model needs one probability pair per edge");
  }
  for (std::size_t e = 0; e < num_edges; ++e) {
    const auto& pp = m.p_plus[e];
    const auto& pm = m.p_minus[e];
    if (pp <= 0 || pp >= 1 || pm <= 0 || pm >= 1 || pp + pm >= 1) {
      throw Error(ErrorCode::InvalidModel, "edge " + std::to_string(e + 1) + ": need 0 < p+, p- and p+ + p- < 1");
    }
  }
  const auto& neg = m.magnitude_range_neg;
  const auto& pos = m.magnitude_range_pos;
  if (!(neg.lo < neg.hi) || neg.hi >= 0) {
    throw Error(ErrorCode::InvalidModel, "negative magnitude range must be a nonempty interval below 0");
  }
  if (!(pos.lo < pos.hi) || pos.lo <= 0) {
    throw Error(ErrorCode::InvalidModel, "positive magnitude range must be a nonempty interval above 0");
  }
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent stream for draw number `index` under `seed`.
inline std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

/// Uniform on a grid of 2^32 points over [lo, hi), exact.
inline Rational draw_in(const Interval& iv, std::mt19937_64& rng) {
  const std::uint64_t k = rng() >> 32;
  Rational t(mpz_class(static_cast<unsigned long>(k)), mpz_class(1) << 32);
  t.canonicalize();
  return iv.lo + (iv.hi - iv.lo) * t;
}

/// 0 = clean, +1 / -1 = outlier sign, drawn with the edge's probabilities.
inline int draw_sign(double p_plus, double p_minus, std::mt19937_64& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < p_plus) return 1;
  if (u < p_plus + p_minus) return -1;
  return 0;
}

}  // namespace detail

/// Random canonical instance; every edge and dimension is drawn independently.
inline ProblemInstance sample_outliers(const MeasurementGraph& g, const OutlierModel& model, int d,
                                       std::uint64_t seed) {
  validate_model(model, g.num_edges());
  if (d < 1) throw Error(ErrorCode::DimensionMismatch, "dimension must be positive");
  std::mt19937_64 rng(detail::splitmix64(seed));
  ProblemInstance inst{g, d, std::vector<std::vector<Rational>>(g.num_edges(), std::vector<Rational>(d))};
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const double pp = model.p_plus[e].get_d();
    const double pm = model.p_minus[e].get_d();
    for (int k = 0; k < d; ++k) {
      const int s = detail::draw_sign(pp, pm, rng);
      if (s > 0) {
        inst.epsilon[e][k] = detail::draw_in(model.magnitude_range_pos, rng);
      } else if (s < 0) {
        inst.epsilon[e][k] = detail::draw_in(model.magnitude_range_neg, rng);
      } else {
        inst.epsilon[e][k] = 0;
      }
    }
  }
  return inst;
}

}  // namespace verilocal
