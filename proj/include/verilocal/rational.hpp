#pragma once

#include <gmpxx.h>

#include <cctype>
#include <string>
#include <string_view>

#include "verilocal/error.hpp"

namespace verilocal {

/// Exact arithmetic type used wherever a verdict depends on equality of costs.
using Rational = mpq_class;

/// num/den in lowest terms; mpq_class(num, den) alone does not reduce.
inline Rational make_rational(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

/// Serializes as "num/den", always with an explicit denominator.
inline std::string to_string(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

namespace detail {

inline bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t k = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (k == s.size()) return false;
  for (; k < s.size(); ++k) {
    if (!std::isdigit(static_cast<unsigned char>(s[k]))) return false;
  }
  return true;
}

inline std::string strip_plus(std::string_view s) {
  return std::string(!s.empty() && s[0] == '+' ? s.substr(1) : s);
}

}  // namespace detail

/**
 * Parses "num/den" or a bare integer. Decimal points are rejected so that
 * serialized problem files never carry rounding.
 */
inline Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  const auto num = text.substr(0, slash);
  if (!detail::is_integer_literal(num)) {
    throw Error(ErrorCode::Parse, "bad rational '" + std::string(text) + "'");
  }
  Rational r;
  if (slash == std::string_view::npos) {
    r = Rational(mpz_class(detail::strip_plus(num)));
    return r;
  }
  const auto den = text.substr(slash + 1);
  if (!detail::is_integer_literal(den) || den[0] == '-' || den[0] == '+') {
    throw Error(ErrorCode::Parse, "bad rational '" + std::string(text) + "'");
  }
  mpz_class d(std::string{den});
  if (d == 0) throw Error(ErrorCode::Parse, "zero denominator in '" + std::string(text) + "'");
  r = Rational(mpz_class(detail::strip_plus(num)), d);
  r.canonicalize();
  return r;
}

/// Parses a plain decimal such as "0.125" (or any parse_rational form) exactly.
inline Rational parse_decimal(std::string_view text) {
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) return parse_rational(text);
  std::string whole(text.substr(0, dot));
  std::string frac(text.substr(dot + 1));
  bool negative = !whole.empty() && whole[0] == '-';
  if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole.erase(0, 1);
  if (whole.empty()) whole = "0";
  if (frac.empty() || !detail::is_integer_literal(whole) || !detail::is_integer_literal(frac) ||
      frac[0] == '-' || frac[0] == '+') {
    throw Error(ErrorCode::Parse, "bad decimal '" + std::string(text) + "'");
  }
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
  Rational r(mpz_class(whole) * scale + mpz_class(frac), scale);
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

}  // namespace verilocal
