#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

#include "dosc/errors.hpp"

namespace dosc {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parses "p", "p/q" or "-p/q". Rejects decimals and empty denominators.
inline Rational parse_rational(std::string_view text) {
  auto bad = [&] {
    return Error(ErrorKind::Config, "malformed rational '" + std::string(text) + "'");
  };
  if (text.empty()) throw bad();
  auto digits_ok = [](std::string_view s, bool allow_sign) {
    if (s.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  const auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  if (!digits_ok(num, true)) throw bad();
  BigInt p(std::string(num[0] == '+' ? num.substr(1) : num));
  if (slash == std::string_view::npos) return Rational(p);
  std::string_view den = text.substr(slash + 1);
  if (!digits_ok(den, false)) throw bad();
  BigInt q{std::string(den)};
  if (q == 0) throw bad();
  return Rational(p, q);
}

/// Also accepts exact decimals such as "0.7" or "-1.25".
inline Rational parse_rational_or_decimal(std::string_view text) {
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) return parse_rational(text);
  std::string_view frac = text.substr(dot + 1);
  std::string_view whole = text.substr(0, dot);
  const bool neg = !whole.empty() && whole[0] == '-';
  if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole.remove_prefix(1);
  auto all_digits = [](std::string_view s) {
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return true;
  };
  if ((whole.empty() && frac.empty()) || !all_digits(whole) || !all_digits(frac))
    throw Error(ErrorKind::Config, "malformed number '" + std::string(text) + "'");
  BigInt num(std::string(whole.empty() ? "0" : whole) + std::string(frac));
  BigInt den = 1;
  for (std::size_t k = 0; k < frac.size(); ++k) den *= 10;
  Rational r(num, den);
  return neg ? Rational(-r) : r;
}

/// Canonical "p/q" form; integers print without a denominator.
inline std::string format_rational(const Rational& r) {
  const BigInt& q = boost::multiprecision::denominator(r);
  std::string out = boost::multiprecision::numerator(r).str();
  if (q != 1) out += "/" + q.str();
  return out;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline Rational rpow(const Rational& base, int e) {
  Rational out = 1;
  for (int k = 0; k < e; ++k) out *= base;
  return out;
}

}  // namespace dosc
