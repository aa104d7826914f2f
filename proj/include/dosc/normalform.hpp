#pragma once

#include <optional>
#include <vector>

#include "dosc/polynomial.hpp"

namespace dosc {

/// Truncated power series in x1; coefficients[k] multiplies x1^k for k <= N.
struct SeriesCurve {
  std::vector<Rational> coefficients;
  int N = 0;

  /// Index of the first nonzero coefficient, or nullopt when zero to order N.
  std::optional<int> order() const;
};

/// phi = b(x1,x2) (x2 - psi(x1))^2 + b0(x1), with b stored in shifted form:
/// b(x1, x2) = b_shifted(x1, x2 - psi(x1)).
struct NormalFormData {
  std::optional<int> m;  // nullopt means psi vanishes to order N
  std::optional<int> n;  // nullopt means b0 vanishes to order N
  SeriesCurve psi;
  SeriesCurve b0;
  Rational omega0;
  Rational beta0;
  Rational b1_0;
  std::vector<Rational> b2_series;  // b(0, x2) = x2^2 * sum b2_series[k] x2^k
  RationalMatrix2 linear_change;    // x = linear_change * y
  Polynomial transformed;           // phi(linear_change * y)
  Polynomial b_shifted;
  int N = 0;
};

enum class Regime { LA, EXCEPTIONAL, NLA, D_INF };

const char* to_string(Regime r);

int corank(const Polynomial& poly);

struct LinearChange {
  RationalMatrix2 matrix;
  Polynomial transformed;
};

/// Moves a simple rational root line of the cubic part to {x1 = 0} and
/// shears so the x1^2 x2 coefficient vanishes.
LinearChange dtype_linear_change(const Polynomial& poly);

/// 2 * total degree + 4.
int default_truncation(const Polynomial& poly);

SeriesCurve extract_psi(const Polynomial& poly, int N);
NormalFormData extract_b0_b(const Polynomial& poly, const SeriesCurve& psi, int N);

/// Full pipeline: linear change, psi, then b0 and b. N <= 0 selects the default.
NormalFormData normal_form(const Polynomial& poly, int N = 0);

/// b (x2 - psi)^2 + b0 in the transformed coordinates, truncated to total degree N.
Polynomial reconstruct(const NormalFormData& nf);

Regime classify_regime(std::optional<int> m, std::optional<int> n);

}  // namespace dosc
