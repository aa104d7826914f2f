#pragma once

#include <vector>

#include "dosc/rational.hpp"

namespace dosc {

/// Dense univariate polynomial over Q, c[k] multiplies u^k.
/// Trailing zeros are trimmed so the zero polynomial has no coefficients.
class UPoly {
 public:
  UPoly() = default;
  explicit UPoly(std::vector<Rational> c);

  const std::vector<Rational>& coeffs() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const Rational& lead() const { return c_.back(); }

  UPoly derivative() const;
  UPoly monic() const;
  Rational eval(const Rational& u) const;
  /// Sign of p at +inf (dir > 0) or -inf (dir < 0).
  int sign_at_infinity(int dir) const;

  friend UPoly operator+(const UPoly& a, const UPoly& b);
  friend UPoly operator-(const UPoly& a, const UPoly& b);
  friend UPoly operator*(const UPoly& a, const UPoly& b);
  bool operator==(const UPoly&) const = default;

  /// Euclidean division; throws DomainError on division by zero.
  static void divmod(const UPoly& a, const UPoly& b, UPoly& q, UPoly& r);

 private:
  void trim();
  std::vector<Rational> c_;
};

UPoly gcd(UPoly a, UPoly b);

/// Yun's algorithm: returns factors f_1, f_2, ... with p = c * prod f_k^k,
/// each f_k square-free and pairwise coprime (some may be constant).
std::vector<UPoly> square_free_decomposition(const UPoly& p);

/// Number of distinct real roots, counted with a Sturm sequence.
int count_real_roots(const UPoly& p);

/// Rational roots of p (distinct), from the rational root theorem applied to
/// the primitive integer form. Intended for small-degree forms.
std::vector<Rational> rational_roots(const UPoly& p);

}  // namespace dosc
