#include "dosc/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace dosc {

Polynomial::Polynomial(const Terms& terms) {
  for (const auto& [e, c] : terms) add_term(e.first, e.second, c);
}

Polynomial Polynomial::constant(const Rational& c) { return monomial(0, 0, c); }

Polynomial Polynomial::monomial(int i, int j, const Rational& c) {
  Polynomial p;
  p.add_term(i, j, c);
  return p;
}

Rational Polynomial::coeff(int i, int j) const {
  auto it = terms_.find({i, j});
  return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::add_term(int i, int j, const Rational& c) {
  if (i < 0 || j < 0) throw Error(ErrorKind::InvalidPhase, "negative exponent");
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace({i, j}, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

int Polynomial::total_degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, e.first + e.second);
  return d;
}

int Polynomial::degree_in_x1() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, e.first);
  return d;
}

int Polynomial::degree_in_x2() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, e.second);
  return d;
}

Polynomial Polynomial::homogeneous_part(int k) const {
  Polynomial out;
  for (const auto& [e, c] : terms_)
    if (e.first + e.second == k) out.terms_.emplace(e, c);
  return out;
}

Polynomial Polynomial::truncated_x1(int max_x1) const {
  Polynomial out;
  for (const auto& [e, c] : terms_)
    if (e.first <= max_x1) out.terms_.emplace(e, c);
  return out;
}

Polynomial Polynomial::derivative(int var) const {
  Polynomial out;
  for (const auto& [e, c] : terms_) {
    if (var == 0 && e.first > 0) out.add_term(e.first - 1, e.second, c * e.first);
    if (var == 1 && e.second > 0) out.add_term(e.first, e.second - 1, c * e.second);
  }
  return out;
}

Polynomial Polynomial::pow(int e) const {
  if (e < 0) throw Error(ErrorKind::DomainError, "negative power");
  Polynomial result = constant(1), base = *this;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

Polynomial Polynomial::compose_linear(const RationalMatrix2& A) const {
  const Polynomial l1 = monomial(1, 0, A.a11) + monomial(0, 1, A.a12);
  const Polynomial l2 = monomial(1, 0, A.a21) + monomial(0, 1, A.a22);
  const int d1 = std::max(degree_in_x1(), 0), d2 = std::max(degree_in_x2(), 0);
  std::vector<Polynomial> p1(d1 + 1), p2(d2 + 1);
  p1[0] = p2[0] = constant(1);
  for (int k = 1; k <= d1; ++k) p1[k] = p1[k - 1] * l1;
  for (int k = 1; k <= d2; ++k) p2[k] = p2[k - 1] * l2;
  Polynomial out;
  for (const auto& [e, c] : terms_) out += c * (p1[e.first] * p2[e.second]);
  return out;
}

double Polynomial::eval(double x1, double x2) const {
  double s = 0.0;
  for (const auto& [e, c] : terms_)
    s += to_double(c) * std::pow(x1, e.first) * std::pow(x2, e.second);
  return s;
}

Polynomial Polynomial::operator-() const {
  Polynomial out = *this;
  for (auto& [e, c] : out.terms_) c = -c;
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [e, c] : o.terms_) add_term(e.first, e.second, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  for (const auto& [e, c] : o.terms_) add_term(e.first, e.second, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_)
      out.add_term(ea.first + eb.first, ea.second + eb.second, ca * cb);
  return out;
}

std::string Polynomial::canonical() const {
  std::string s;
  for (const auto& [e, c] : terms_)
    s += std::to_string(e.first) + "," + std::to_string(e.second) + "," + format_rational(c) + ";";
  return s;
}

std::vector<NumericTerm> to_numeric(const Polynomial& p) {
  std::vector<NumericTerm> out;
  out.reserve(p.terms().size());
  for (const auto& [e, c] : p.terms()) out.push_back({e.first, e.second, to_double(c)});
  return out;
}

}  // namespace dosc
