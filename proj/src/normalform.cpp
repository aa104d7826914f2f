#include "dosc/normalform.hpp"

#include <algorithm>

#include "dosc/newton.hpp"
#include "dosc/univariate.hpp"

namespace dosc {

namespace {

using Series = std::vector<Rational>;

Series mul_trunc(const Series& a, const Series& b, std::size_t len) {
  Series out(len);
  for (std::size_t i = 0; i < a.size() && i < len; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size() && i + j < len; ++j)
      if (b[j] != 0) out[i + j] += a[i] * b[j];
  }
  return out;
}

void add_into(Series& a, const Series& b) {
  if (a.size() < b.size()) a.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
}

// Coefficient of x2^j as a series in x1, truncated to length len.
std::vector<Series> x2_slices(const Polynomial& p, std::size_t len) {
  std::vector<Series> out(std::max(p.degree_in_x2(), 0) + 1, Series(len));
  for (const auto& [e, c] : p.terms())
    if (static_cast<std::size_t>(e.first) < len) out[e.second][e.first] = c;
  return out;
}

Series horner(const std::vector<Series>& slices, const Series& y, std::size_t len) {
  Series r = slices.back();
  r.resize(len);
  for (int j = static_cast<int>(slices.size()) - 2; j >= 0; --j) {
    r = mul_trunc(r, y, len);
    add_into(r, slices[j]);
    r.resize(len);
  }
  return r;
}

Rational eval_exact(const Polynomial& p, const Rational& x, const Rational& y) {
  Rational s = 0;
  for (const auto& [e, c] : p.terms()) s += c * rpow(x, e.first) * rpow(y, e.second);
  return s;
}

Polynomial mul_trunc_total(const Polynomial& a, const Polynomial& b, int max_deg) {
  Polynomial out;
  for (const auto& [ea, ca] : a.terms())
    for (const auto& [eb, cb] : b.terms())
      if (ea.first + ea.second + eb.first + eb.second <= max_deg)
        out.add_term(ea.first + eb.first, ea.second + eb.second, ca * cb);
  return out;
}

struct Candidate {
  Rational v1, v2;
  Rational score;
  Rational closeness;  // v2^2 / |v|^2
};

}  // namespace

const char* to_string(Regime r) {
  switch (r) {
    case Regime::LA: return "LA";
    case Regime::EXCEPTIONAL: return "EXCEPTIONAL";
    case Regime::NLA: return "NLA";
    case Regime::D_INF: return "D_INF";
  }
  return "UNKNOWN";
}

std::optional<int> SeriesCurve::order() const {
  for (std::size_t k = 0; k < coefficients.size(); ++k)
    if (coefficients[k] != 0) return static_cast<int>(k);
  return std::nullopt;
}

int corank(const Polynomial& poly) {
  const Rational a = 2 * poly.coeff(2, 0), b = poly.coeff(1, 1), c = 2 * poly.coeff(0, 2);
  if (a == 0 && b == 0 && c == 0) return 2;
  return a * c - b * b != 0 ? 0 : 1;
}

LinearChange dtype_linear_change(const Polynomial& poly) {
  if (corank(poly) != 2) throw Error(ErrorKind::NotDType, "singularity does not have corank two");
  const Polynomial F = poly.homogeneous_part(3);
  if (F.is_zero()) throw Error(ErrorKind::NotDType, "cubic part vanishes");
  if (max_root_multiplicity(F) >= 3) throw Error(ErrorKind::NotDType, "cubic part has a triple root line");

  const Polynomial F1 = F.derivative(0), F2 = F.derivative(1);
  std::vector<Candidate> cands;
  auto consider = [&](const Rational& v1, const Rational& v2) {
    const Rational g1 = eval_exact(F1, v1, v2), g2 = eval_exact(F2, v1, v2);
    if (g1 == 0 && g2 == 0) return;  // multiple root
    const Rational n2 = v1 * v1 + v2 * v2;
    cands.push_back({v1, v2, (g1 * g1 + g2 * g2) / (n2 * n2), v2 * v2 / n2});
  };
  if (F.coeff(0, 3) == 0) consider(0, 1);
  std::vector<Rational> pc(4);
  for (int j = 0; j <= 3; ++j) pc[j] = F.coeff(3 - j, j);
  for (const auto& u : rational_roots(UPoly(pc))) consider(1, u);
  if (cands.empty()) throw Error(ErrorKind::ReductionFailed, "no simple rational root line of the cubic part");

  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.closeness != b.closeness) return a.closeness > b.closeness;
    return a.v1 * b.v2 < b.v1 * a.v2;
  });
  const Candidate& best = cands.front();

  RationalMatrix2 A;
  if (best.v2 != 0)
    A = {1, best.v1 / best.v2, 0, 1};
  else
    A = {0, 1, 1, 0};
  Polynomial phi = poly.compose_linear(A);
  const Rational q12 = phi.coeff(1, 2), q21 = phi.coeff(2, 1);
  if (q12 == 0) throw Error(ErrorKind::NotDType, "coefficient of x1 x2^2 vanishes");
  if (q21 != 0) {
    const RationalMatrix2 B{1, 0, -q21 / (2 * q12), 1};
    phi = phi.compose_linear(B);
    A = A * B;
  }
  return {A, phi};
}

int default_truncation(const Polynomial& poly) { return 2 * std::max(poly.total_degree(), 0) + 4; }

SeriesCurve extract_psi(const Polynomial& poly, int N) {
  if (N < 2) throw Error(ErrorKind::Config, "truncation order must be at least 2");
  const Rational c12 = poly.coeff(1, 2);
  if (c12 == 0) throw Error(ErrorKind::ReductionFailed, "coefficient of x1 x2^2 vanishes");
  const Polynomial d2 = poly.derivative(1);
  const std::size_t len = N + 2;
  const auto slices = x2_slices(d2, len);

  SeriesCurve psi{Series(N + 1), N};
  Series g = slices.front();
  for (int k = 0; k <= 2; ++k)
    if (g[k] != 0) throw Error(ErrorKind::ReductionFailed, "phase is not in reduced position");
  for (int k = 2; k <= N; ++k) {
    g = horner(slices, psi.coefficients, k + 2);
    psi.coefficients[k] = -g[k + 1] / (2 * c12);
  }
  return psi;
}

NormalFormData extract_b0_b(const Polynomial& poly, const SeriesCurve& psi, int N) {
  const std::size_t len = N + 1;
  const auto slices = x2_slices(poly, len);
  Series y = psi.coefficients;
  y.resize(len);

  // Horner in x2 with x2 = u + psi; R[k] is the coefficient series of u^k.
  std::vector<Series> R{slices.back()};
  for (int j = static_cast<int>(slices.size()) - 2; j >= 0; --j) {
    std::vector<Series> next(R.size() + 1, Series(len));
    for (std::size_t k = 0; k < R.size(); ++k) {
      add_into(next[k + 1], R[k]);
      add_into(next[k], mul_trunc(R[k], y, len));
    }
    add_into(next[0], slices[j]);
    R = std::move(next);
  }
  while (R.size() < 4) R.emplace_back(len);

  for (const auto& v : R[1])
    if (v != 0) throw Error(ErrorKind::ReductionFailed, "division by (x2 - psi)^2 leaves a remainder");
  if (R[2][0] != 0) throw Error(ErrorKind::ReductionFailed, "b(0,0) != 0");
  if (R[3][0] != 0) throw Error(ErrorKind::ReductionFailed, "d2 b(0,0) != 0");

  NormalFormData nf;
  nf.N = N;
  nf.psi = psi;
  nf.b0 = SeriesCurve{R[0], N};
  nf.b1_0 = R[2][1];
  if (nf.b1_0 == 0) throw Error(ErrorKind::NotDType, "d1 b(0,0) = 0");
  nf.m = psi.order();
  if (nf.m) nf.omega0 = psi.coefficients[*nf.m];
  nf.n = nf.b0.order();
  if (nf.n) {
    if (*nf.n < 3) throw Error(ErrorKind::NotDType, "b0 has order " + std::to_string(*nf.n));
    nf.beta0 = nf.b0.coefficients[*nf.n];
  }
  for (std::size_t k = 4; k < R.size(); ++k) nf.b2_series.push_back(R[k][0]);
  for (std::size_t k = 2; k < R.size(); ++k)
    for (std::size_t i = 0; i < len; ++i)
      if (R[k][i] != 0) nf.b_shifted.add_term(static_cast<int>(i), static_cast<int>(k) - 2, R[k][i]);
  nf.transformed = poly;
  return nf;
}

NormalFormData normal_form(const Polynomial& poly, int N) {
  taylor_support(poly);
  if (N <= 0) N = default_truncation(poly);
  const LinearChange lc = dtype_linear_change(poly);
  NormalFormData nf = extract_b0_b(lc.transformed, extract_psi(lc.transformed, N), N);
  nf.linear_change = lc.matrix;
  return nf;
}

Polynomial reconstruct(const NormalFormData& nf) {
  const int N = nf.N;
  Polynomial u = Polynomial::x2();
  for (std::size_t k = 0; k < nf.psi.coefficients.size(); ++k)
    u.add_term(static_cast<int>(k), 0, -nf.psi.coefficients[k]);
  const int ju = std::max(nf.b_shifted.degree_in_x2(), 0) + 2;
  std::vector<Polynomial> upow(ju + 1);
  upow[0] = Polynomial::constant(1);
  for (int j = 1; j <= ju; ++j) upow[j] = mul_trunc_total(upow[j - 1], u, N);
  Polynomial out;
  for (const auto& [e, c] : nf.b_shifted.terms())
    if (e.first <= N) out += mul_trunc_total(Polynomial::monomial(e.first, 0, c), upow[e.second + 2], N);
  for (std::size_t k = 0; k < nf.b0.coefficients.size(); ++k)
    if (static_cast<int>(k) <= N) out.add_term(static_cast<int>(k), 0, nf.b0.coefficients[k]);
  return out;
}

Regime classify_regime(std::optional<int> m, std::optional<int> n) {
  if (m && *m < 2) throw Error(ErrorKind::InvalidInvariants, "m < 2");
  if (n && *n < 3) throw Error(ErrorKind::InvalidInvariants, "n < 3");
  if (!m && !n) throw Error(ErrorKind::InvalidInvariants, "m and n both infinite");
  if (!n) return Regime::D_INF;
  if (!m || 2 * *m + 1 > *n) return Regime::LA;
  if (2 * *m + 1 == *n) return Regime::EXCEPTIONAL;
  return Regime::NLA;
}

}  // namespace dosc
