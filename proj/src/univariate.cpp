#include "dosc/univariate.hpp"

#include <algorithm>
#include <set>

namespace dosc {

namespace mp = boost::multiprecision;

UPoly::UPoly(std::vector<Rational> c) : c_(std::move(c)) { trim(); }

void UPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

UPoly UPoly::derivative() const {
  std::vector<Rational> d;
  for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(c_[k] * static_cast<int>(k));
  return UPoly(std::move(d));
}

UPoly UPoly::monic() const {
  if (is_zero()) return *this;
  std::vector<Rational> out = c_;
  const Rational l = lead();
  for (auto& v : out) v /= l;
  return UPoly(std::move(out));
}

Rational UPoly::eval(const Rational& u) const {
  Rational s = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * u + *it;
  return s;
}

int UPoly::sign_at_infinity(int dir) const {
  if (is_zero()) return 0;
  int s = lead() > 0 ? 1 : -1;
  if (dir < 0 && degree() % 2 == 1) s = -s;
  return s;
}

UPoly operator+(const UPoly& a, const UPoly& b) {
  std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
  for (std::size_t k = 0; k < b.c_.size(); ++k) c[k] += b.c_[k];
  return UPoly(std::move(c));
}

UPoly operator-(const UPoly& a, const UPoly& b) {
  std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
  for (std::size_t k = 0; k < b.c_.size(); ++k) c[k] -= b.c_[k];
  return UPoly(std::move(c));
}

UPoly operator*(const UPoly& a, const UPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> c(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return UPoly(std::move(c));
}

void UPoly::divmod(const UPoly& a, const UPoly& b, UPoly& q, UPoly& r) {
  if (b.is_zero()) throw Error(ErrorKind::DomainError, "polynomial division by zero");
  std::vector<Rational> rem = a.c_;
  const int db = b.degree();
  std::vector<Rational> quo(std::max(0, a.degree() - db + 1));
  for (int k = a.degree(); k >= db; --k) {
    const Rational f = rem[k] / b.lead();
    if (f == 0) continue;
    quo[k - db] = f;
    for (int i = 0; i <= db; ++i) rem[k - db + i] -= f * b.c_[i];
  }
  q = UPoly(std::move(quo));
  r = UPoly(std::move(rem));
}

UPoly gcd(UPoly a, UPoly b) {
  while (!b.is_zero()) {
    UPoly q, r;
    UPoly::divmod(a, b, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

std::vector<UPoly> square_free_decomposition(const UPoly& p) {
  std::vector<UPoly> out;
  if (p.degree() < 1) return out;
  UPoly q, r;
  const UPoly dp = p.derivative();
  UPoly a = gcd(p, dp);
  UPoly b, c, d;
  UPoly::divmod(p, a, b, r);
  UPoly::divmod(dp, a, c, r);
  d = c - b.derivative();
  while (b.degree() >= 1) {
    UPoly g = gcd(b, d);
    out.push_back(g);
    UPoly nb, nc;
    UPoly::divmod(b, g, nb, r);
    UPoly::divmod(d, g, nc, r);
    b = nb;
    c = nc;
    d = c - b.derivative();
  }
  return out;
}

namespace {

int sign_changes(const std::vector<int>& signs) {
  int n = 0, last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++n;
    last = s;
  }
  return n;
}

}  // namespace

int count_real_roots(const UPoly& p) {
  if (p.degree() < 1) return 0;
  std::vector<UPoly> seq{p, p.derivative()};
  while (!seq.back().is_zero()) {
    UPoly q, r;
    UPoly::divmod(seq[seq.size() - 2], seq.back(), q, r);
    if (r.is_zero()) break;
    seq.push_back(UPoly() - r);
  }
  std::vector<int> lo, hi;
  for (const auto& s : seq) {
    lo.push_back(s.sign_at_infinity(-1));
    hi.push_back(s.sign_at_infinity(1));
  }
  return sign_changes(lo) - sign_changes(hi);
}

namespace {

std::vector<BigInt> divisors(BigInt v) {
  if (v < 0) v = -v;
  std::vector<BigInt> out;
  for (BigInt d = 1; d * d <= v; ++d) {
    if (v % d == 0) {
      out.push_back(d);
      if (d * d != v) out.push_back(v / d);
    }
  }
  return out;
}

}  // namespace

std::vector<Rational> rational_roots(const UPoly& p) {
  std::set<Rational> roots;
  if (p.degree() < 1) return {};
  std::vector<Rational> c = p.coeffs();
  std::size_t low = 0;
  while (c[low] == 0) ++low;
  if (low > 0) roots.insert(Rational(0));
  BigInt den_lcm = 1;
  for (const auto& v : c) den_lcm = mp::lcm(den_lcm, mp::denominator(v));
  std::vector<BigInt> ic;
  for (std::size_t k = low; k < c.size(); ++k) ic.push_back(mp::numerator(Rational(c[k] * den_lcm)));
  if (ic.size() > 1) {
    const auto ps = divisors(ic.front());
    const auto qs = divisors(ic.back());
    for (const auto& a : ps)
      for (const auto& b : qs)
        for (int sgn : {1, -1}) {
          Rational cand(BigInt(sgn) * a, b);
          if (p.eval(cand) == 0) roots.insert(cand);
        }
  }
  return {roots.begin(), roots.end()};
}

}  // namespace dosc
