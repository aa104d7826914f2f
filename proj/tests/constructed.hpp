#pragma once

#include <random>

#include "dosc/polynomial.hpp"

// Random phases b (x2 - psi)^2 + b0 with prescribed orders of psi and b0.
struct ConstructedPhase {
  dosc::Polynomial phi;
  int m;
  int n;
  dosc::Rational omega0;
  dosc::Rational beta0;
  dosc::Rational b1_0;
};

inline dosc::Rational random_nonzero(std::mt19937& rng) {
  std::uniform_int_distribution<int> num(1, 9), den(1, 5), sgn(0, 1);
  return dosc::Rational(sgn(rng) ? num(rng) : -num(rng), den(rng));
}

inline dosc::Rational random_maybe_zero(std::mt19937& rng) {
  std::uniform_int_distribution<int> coin(0, 2);
  return coin(rng) == 0 ? dosc::Rational(0) : random_nonzero(rng);
}

inline ConstructedPhase make_constructed_phase(std::mt19937& rng, int m, int n) {
  using dosc::Polynomial;
  ConstructedPhase c{{}, m, n, random_nonzero(rng), random_nonzero(rng), random_nonzero(rng)};
  Polynomial b = Polynomial::monomial(1, 0, c.b1_0);
  for (int i = 0; i <= 2; ++i)
    for (int j = 0; j <= 2; ++j)
      if (i + j >= 2) b.add_term(i, j, random_maybe_zero(rng));
  Polynomial psi = Polynomial::monomial(m, 0, c.omega0);
  psi.add_term(m + 1, 0, random_maybe_zero(rng));
  psi.add_term(m + 2, 0, random_maybe_zero(rng));
  Polynomial b0 = Polynomial::monomial(n, 0, c.beta0);
  b0.add_term(n + 1, 0, random_maybe_zero(rng));
  const Polynomial u = Polynomial::x2() - psi;
  c.phi = b * u * u + b0;
  return c;
}
