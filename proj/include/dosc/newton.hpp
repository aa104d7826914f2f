#pragma once

#include <optional>
#include <vector>

#include "dosc/polynomial.hpp"

namespace dosc {

struct NormalFormData;

/// Maximum total degree accepted in lattice geometry.
inline constexpr int kMaxSupportDegree = 64;

struct LatticePoint {
  int t1 = 0;
  int t2 = 0;
  auto operator<=>(const LatticePoint&) const = default;
};

struct TaylorSupport {
  std::vector<LatticePoint> points;  // sorted, unique
  std::map<std::pair<int, int>, Rational> coefficients;
};

/// Rational weight (k1, k2) of a supporting line k1*t1 + k2*t2 = 1.
struct Weight {
  Rational k1;
  Rational k2;
};

struct PolygonEdge {
  LatticePoint from;  // smaller t1
  LatticePoint to;
  Weight weight;
};

/// Lower-left staircase hull. Vertices run from the top-left (smallest t1)
/// to the bottom-right (smallest t2), so t1 increases and t2 decreases.
struct NewtonPolygon {
  std::vector<LatticePoint> vertices;
  std::vector<PolygonEdge> edges;

  /// True when p lies in the closed hull of the union of p_i + R^2_+.
  bool contains(const Rational& x, const Rational& y) const;
};

enum class FaceKind { Vertex, Edge, VerticalRay, HorizontalRay };

struct PrincipalFace {
  FaceKind kind = FaceKind::Vertex;
  LatticePoint a;  // the vertex, or the edge start, or the ray origin
  LatticePoint b;  // edge end (Edge only)
  /// Lattice membership test for the face.
  bool contains(const LatticePoint& p) const;
};

struct NewtonDistanceResult {
  Rational d;
  PrincipalFace principal_face;
  Polynomial principal_part;
};

struct HeightReport {
  Rational d_given;
  Rational h;
  bool h_is_dinf = false;
  Rational h_lin_reference;
  bool adapted_linear = false;
};

TaylorSupport taylor_support(const Polynomial& poly);
NewtonPolygon newton_polygon(const TaylorSupport& support);
NewtonPolygon newton_polygon(const std::vector<LatticePoint>& points);

/// Distance only; the principal part is empty.
NewtonDistanceResult newton_distance(const NewtonPolygon& polygon);
/// Distance plus principal part of `poly` on the principal face.
NewtonDistanceResult newton_distance(const NewtonPolygon& polygon, const Polynomial& poly);

/// Maximal multiplicity of a real root line of a nonzero homogeneous form.
int max_root_multiplicity(const Polynomial& form);

HeightReport height_report(const NormalFormData& nf);

const char* to_string(FaceKind k);

}  // namespace dosc
