#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dosc/rational.hpp"

namespace dosc {

/// Exponent pair (power of x1, power of x2).
using Exponent = std::pair<int, int>;

/// Exact 2x2 rational matrix acting on column vectors, x = A y.
struct RationalMatrix2 {
  Rational a11{1}, a12{0}, a21{0}, a22{1};

  static RationalMatrix2 identity() { return {}; }
  Rational det() const { return a11 * a22 - a12 * a21; }
  RationalMatrix2 operator*(const RationalMatrix2& o) const {
    return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
            a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
  }
  bool operator==(const RationalMatrix2&) const = default;
};

/// Sparse bivariate polynomial with exact rational coefficients.
/// Zero coefficients are never stored.
class Polynomial {
 public:
  using Terms = std::map<Exponent, Rational>;

  Polynomial() = default;
  explicit Polynomial(const Terms& terms);

  static Polynomial constant(const Rational& c);
  static Polynomial monomial(int i, int j, const Rational& c = Rational(1));
  static Polynomial x1() { return monomial(1, 0); }
  static Polynomial x2() { return monomial(0, 1); }

  const Terms& terms() const { return terms_; }
  Rational coeff(int i, int j) const;
  void add_term(int i, int j, const Rational& c);

  bool is_zero() const { return terms_.empty(); }
  /// -1 for the zero polynomial.
  int total_degree() const;
  int degree_in_x1() const;
  int degree_in_x2() const;
  /// Terms of total degree exactly k.
  Polynomial homogeneous_part(int k) const;
  /// Drops every term whose x1 exponent exceeds `max_x1`.
  Polynomial truncated_x1(int max_x1) const;

  Polynomial derivative(int var) const;
  Polynomial pow(int e) const;
  /// phi(A y): substitutes x1 = a11 y1 + a12 y2, x2 = a21 y1 + a22 y2.
  Polynomial compose_linear(const RationalMatrix2& A) const;

  double eval(double x1, double x2) const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Rational& c);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }
  bool operator==(const Polynomial&) const = default;

  /// Sorted "i,j,p/q;" listing used for hashing and test diagnostics.
  std::string canonical() const;

 private:
  Terms terms_;
};

/// Input phase: a polynomial without constant or linear part. The alias
/// documents intent; validation happens in `taylor_support`.
using PolynomialPhase = Polynomial;

/// Coefficients of phi(x1, x2) as a list of (i, j, value) in double precision.
struct NumericTerm {
  int i;
  int j;
  double c;
};
std::vector<NumericTerm> to_numeric(const Polynomial& p);

}  // namespace dosc
