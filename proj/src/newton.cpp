#include "dosc/newton.hpp"

#include <algorithm>

#include "dosc/normalform.hpp"
#include "dosc/univariate.hpp"

namespace dosc {

namespace {

// Cross product of (b - a) and (c - a).
long long cross(const LatticePoint& a, const LatticePoint& b, const LatticePoint& c) {
  return static_cast<long long>(b.t1 - a.t1) * (c.t2 - a.t2) -
         static_cast<long long>(b.t2 - a.t2) * (c.t1 - a.t1);
}

Weight edge_weight(const LatticePoint& a, const LatticePoint& b) {
  const Rational n1 = a.t2 - b.t2, n2 = b.t1 - a.t1;
  const Rational c = n1 * a.t1 + n2 * a.t2;
  return {n1 / c, n2 / c};
}

}  // namespace

const char* to_string(FaceKind k) {
  switch (k) {
    case FaceKind::Vertex: return "vertex";
    case FaceKind::Edge: return "edge";
    case FaceKind::VerticalRay: return "vertical_ray";
    case FaceKind::HorizontalRay: return "horizontal_ray";
  }
  return "unknown";
}

TaylorSupport taylor_support(const Polynomial& poly) {
  if (poly.is_zero()) throw Error(ErrorKind::InvalidPhase, "zero polynomial");
  if (poly.total_degree() > kMaxSupportDegree)
    throw Error(ErrorKind::InvalidPhase, "total degree exceeds " + std::to_string(kMaxSupportDegree));
  TaylorSupport s;
  for (const auto& [e, c] : poly.terms()) {
    if (e.first + e.second < 2)
      throw Error(ErrorKind::InvalidPhase, "constant or linear term x1^" + std::to_string(e.first) +
                                               " x2^" + std::to_string(e.second));
    s.points.push_back({e.first, e.second});
    s.coefficients.emplace(e, c);
  }
  std::sort(s.points.begin(), s.points.end());
  return s;
}

NewtonPolygon newton_polygon(const TaylorSupport& support) { return newton_polygon(support.points); }

NewtonPolygon newton_polygon(const std::vector<LatticePoint>& input) {
  if (input.empty()) throw Error(ErrorKind::EmptySupport, "empty Taylor support");
  std::vector<LatticePoint> pts = input;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  // End vertex: minimal t2, then minimal t1.
  LatticePoint last = pts.front();
  for (const auto& p : pts)
    if (p.t2 < last.t2 || (p.t2 == last.t2 && p.t1 < last.t1)) last = p;

  // Lower hull by monotone chain, stopped at the end vertex.
  std::vector<LatticePoint> hull;
  for (const auto& p : pts) {
    if (p.t1 > last.t1) break;
    if (p.t2 < last.t2) continue;
    if (!hull.empty() && hull.back().t1 == p.t1) continue;  // same column, larger t2
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0) hull.pop_back();
    hull.push_back(p);
  }
  // Drop points whose t2 does not decrease (possible only before `last`).
  std::vector<LatticePoint> v;
  for (const auto& p : hull) {
    while (!v.empty() && v.back().t2 <= p.t2) v.pop_back();
    v.push_back(p);
  }
  NewtonPolygon poly;
  poly.vertices = v;
  for (std::size_t k = 0; k + 1 < v.size(); ++k) poly.edges.push_back({v[k], v[k + 1], edge_weight(v[k], v[k + 1])});
  return poly;
}

bool NewtonPolygon::contains(const Rational& x, const Rational& y) const {
  const auto& f = vertices.front();
  const auto& l = vertices.back();
  if (x < f.t1 || y < l.t2) return false;
  for (const auto& e : edges) {
    if (x >= e.from.t1 && x <= e.to.t1) return e.weight.k1 * x + e.weight.k2 * y >= 1;
  }
  return true;
}

bool PrincipalFace::contains(const LatticePoint& p) const {
  switch (kind) {
    case FaceKind::Vertex: return p == a;
    case FaceKind::VerticalRay: return p.t1 == a.t1 && p.t2 >= a.t2;
    case FaceKind::HorizontalRay: return p.t2 == a.t2 && p.t1 >= a.t1;
    case FaceKind::Edge:
      return p.t1 >= a.t1 && p.t1 <= b.t1 &&
             static_cast<long long>(b.t1 - a.t1) * (p.t2 - a.t2) ==
                 static_cast<long long>(b.t2 - a.t2) * (p.t1 - a.t1);
  }
  return false;
}

NewtonDistanceResult newton_distance(const NewtonPolygon& polygon) {
  if (polygon.vertices.empty()) throw Error(ErrorKind::EmptySupport, "empty polygon");
  NewtonDistanceResult r;
  const auto& first = polygon.vertices.front();
  const auto& last = polygon.vertices.back();
  for (const auto& v : polygon.vertices) {
    if (v.t1 == v.t2) {
      r.d = v.t1;
      r.principal_face = {FaceKind::Vertex, v, v};
      return r;
    }
  }
  if (first.t1 > first.t2) {
    r.d = first.t1;
    r.principal_face = {FaceKind::VerticalRay, first, first};
    return r;
  }
  if (last.t2 > last.t1) {
    r.d = last.t2;
    r.principal_face = {FaceKind::HorizontalRay, last, last};
    return r;
  }
  for (const auto& e : polygon.edges) {
    if (e.from.t1 < e.from.t2 && e.to.t1 > e.to.t2) {
      r.d = 1 / (e.weight.k1 + e.weight.k2);
      r.principal_face = {FaceKind::Edge, e.from, e.to};
      return r;
    }
  }
  throw Error(ErrorKind::EmptySupport, "bisectrix does not meet the polygon");
}

NewtonDistanceResult newton_distance(const NewtonPolygon& polygon, const Polynomial& poly) {
  NewtonDistanceResult r = newton_distance(polygon);
  for (const auto& [e, c] : poly.terms())
    if (r.principal_face.contains({e.first, e.second})) r.principal_part.add_term(e.first, e.second, c);
  return r;
}

int max_root_multiplicity(const Polynomial& form) {
  if (form.is_zero()) throw Error(ErrorKind::ZeroForm, "zero form");
  const int k = form.total_degree();
  if (form.homogeneous_part(k) != form) throw Error(ErrorKind::InvalidPhase, "form is not homogeneous");
  // Direction x1 = 0.
  int best = k;
  for (const auto& [e, c] : form.terms()) best = std::min(best, e.first);
  // Directions (1, u): p(u) = F(1, u).
  std::vector<Rational> pc(k + 1);
  for (const auto& [e, c] : form.terms()) pc[e.second] = c;
  const UPoly p(pc);
  const auto factors = square_free_decomposition(p);
  for (std::size_t i = 0; i < factors.size(); ++i)
    if (count_real_roots(factors[i]) > 0) best = std::max(best, static_cast<int>(i) + 1);
  return best;
}

HeightReport height_report(const NormalFormData& nf) {
  HeightReport r;
  r.d_given = newton_distance(newton_polygon(taylor_support(nf.transformed)), nf.transformed).d;
  if (nf.n) {
    r.h = Rational(2 * *nf.n, *nf.n + 1);
  } else {
    r.h = 2;
    r.h_is_dinf = true;
  }
  r.adapted_linear = !nf.m || !nf.n || 2 * *nf.m + 1 >= *nf.n;
  if (nf.m && nf.n && 2 * *nf.m + 1 < *nf.n)
    r.h_lin_reference = Rational(2 * *nf.m + 1, 2 * *nf.m);
  else
    r.h_lin_reference = r.h;
  return r;
}

}  // namespace dosc
