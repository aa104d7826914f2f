#include "dosc/phase.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace dosc {

namespace {

double falling(int i, int a) {
  double r = 1.0;
  for (int k = 0; k < a; ++k) r *= i - k;
  return r;
}

double ipow(double x, int e) {
  double r = 1.0;
  for (int k = 0; k < e; ++k) r *= x;
  return r;
}

std::vector<NumericTerm> merge(const std::vector<NumericTerm>& in) {
  std::map<std::pair<int, int>, double> acc;
  for (const auto& t : in) acc[{t.i, t.j}] += t.c;
  std::vector<NumericTerm> out;
  for (const auto& [e, c] : acc)
    if (c != 0.0) out.push_back({e.first, e.second, c});
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_opt(std::optional<int> v) { return v ? std::to_string(*v) : "inf"; }

}  // namespace

const char* to_string(PhaseMode m) {
  switch (m) {
    case PhaseMode::Model: return "model";
    case PhaseMode::NormalForm: return "normal_form";
    case PhaseMode::Polynomial: return "polynomial";
  }
  return "unknown";
}

const char* to_string(CPType t) {
  switch (t) {
    case CPType::A1: return "A1";
    case CPType::A2: return "A2";
    case CPType::A3: return "A3";
    case CPType::HIGHER_OR_ORIGIN: return "HIGHER_OR_ORIGIN";
  }
  return "unknown";
}

DPhase DPhase::model(std::optional<int> n, int sign) {
  if (n && *n < 3) throw Error(ErrorKind::InvalidInvariants, "model phase needs n >= 3");
  if (sign != 1 && sign != -1) throw Error(ErrorKind::Config, "sign must be +1 or -1");
  DPhase p;
  p.mode = PhaseMode::Model;
  p.n = n;
  p.sign = sign;
  return p;
}

DPhase DPhase::normal_form(std::optional<int> n, std::optional<int> m, double omega0, double beta0, double b1_0,
                           double b2_0) {
  if (b1_0 == 0.0) throw Error(ErrorKind::InvalidInvariants, "b1(0,0) must be nonzero");
  if (n && *n < 3) throw Error(ErrorKind::InvalidInvariants, "n must be at least 3");
  if (m && *m < 2) throw Error(ErrorKind::InvalidInvariants, "m must be at least 2");
  DPhase p;
  p.mode = PhaseMode::NormalForm;
  p.n = n;
  p.m = m;
  p.omega0 = m ? omega0 : 0.0;
  p.beta0 = n ? beta0 : 0.0;
  p.b1_0 = b1_0;
  p.b2_0 = b2_0;
  return p;
}

DPhase DPhase::polynomial(const Polynomial& poly) {
  DPhase p;
  p.mode = PhaseMode::Polynomial;
  p.n.reset();
  p.poly = poly;
  return p;
}

DPhase DPhase::exceptional_example(int m) {
  if (m < 2) throw Error(ErrorKind::InvalidInvariants, "m must be at least 2");
  Polynomial poly = Polynomial::monomial(1, 2) - Polynomial::monomial(2 * m + 1, 0, Rational(1, 4 * m * (2 * m + 1)));
  DPhase p = polynomial(poly);
  p.s2_coupling = {{m, 0, 1.0 / (m * (m - 1))}};
  return p;
}

std::vector<NumericTerm> DPhase::terms() const {
  std::vector<NumericTerm> t;
  switch (mode) {
    case PhaseMode::Model:
      t.push_back({1, 2, 1.0});
      if (n) t.push_back({*n, 0, static_cast<double>(sign)});
      break;
    case PhaseMode::NormalForm: {
      // (x2 - w x1^m)^2 = x2^2 - 2 w x1^m x2 + w^2 x1^2m
      std::vector<NumericTerm> sq{{0, 2, 1.0}};
      if (m && omega0 != 0.0) {
        sq.push_back({*m, 1, -2.0 * omega0});
        sq.push_back({2 * *m, 0, omega0 * omega0});
      }
      for (const auto& q : sq) {
        t.push_back({q.i + 1, q.j, b1_0 * q.c});
        if (b2_0 != 0.0) t.push_back({q.i, q.j + 2, b2_0 * q.c});
      }
      if (n) t.push_back({*n, 0, beta0});
      break;
    }
    case PhaseMode::Polynomial: t = to_numeric(poly); break;
  }
  return merge(t);
}

std::string DPhase::canonical() const {
  std::string s = std::string(to_string(mode)) + "|";
  switch (mode) {
    case PhaseMode::Model: s += "n=" + fmt_opt(n) + ";sign=" + std::to_string(sign); break;
    case PhaseMode::NormalForm:
      s += "n=" + fmt_opt(n) + ";m=" + fmt_opt(m) + ";omega0=" + fmt(omega0) + ";beta0=" + fmt(beta0) +
           ";b1_0=" + fmt(b1_0) + ";b2_0=" + fmt(b2_0);
      break;
    case PhaseMode::Polynomial: s += poly.canonical(); break;
  }
  for (const auto& k : s2_coupling)
    s += "|k:" + std::to_string(k.i) + "," + std::to_string(k.j) + "," + fmt(k.c);
  return s;
}

PerturbedPhase::PerturbedPhase(const DPhase& phase, const Eigen::Vector2d& s_) : base(phase), s(s_) {
  std::vector<NumericTerm> t = phase.terms();
  t.push_back({1, 0, -s(0)});
  t.push_back({0, 1, -s(1)});
  for (const auto& k : phase.s2_coupling) t.push_back({k.i, k.j, s(1) * k.c});
  terms = merge(t);
  for (const auto& k : terms) max_j_ = std::max(max_j_, k.j);
}

double PerturbedPhase::derivative(int a, int b, const Eigen::Vector2d& x) const {
  double v = 0.0;
  for (const auto& t : terms) {
    if (t.i < a || t.j < b) continue;
    v += t.c * falling(t.i, a) * falling(t.j, b) * ipow(x(0), t.i - a) * ipow(x(1), t.j - b);
  }
  return v;
}

void PerturbedPhase::x2_slice(double x1, std::vector<double>& c) const {
  c.assign(max_j_ + 1, 0.0);
  for (const auto& t : terms) c[t.j] += t.c * ipow(x1, t.i);
}

double eval(const PerturbedPhase& pp, const Eigen::Vector2d& x) { return pp.derivative(0, 0, x); }

Eigen::Vector2d grad(const PerturbedPhase& pp, const Eigen::Vector2d& x) {
  return {pp.derivative(1, 0, x), pp.derivative(0, 1, x)};
}

Eigen::Matrix2d hess(const PerturbedPhase& pp, const Eigen::Vector2d& x) {
  Eigen::Matrix2d h;
  h(0, 0) = pp.derivative(2, 0, x);
  h(0, 1) = h(1, 0) = pp.derivative(1, 1, x);
  h(1, 1) = pp.derivative(0, 2, x);
  return h;
}

double third(const PerturbedPhase& pp, const Eigen::Vector2d& x, const Eigen::Vector2d& u,
             const Eigen::Vector2d& v, const Eigen::Vector2d& w) {
  double d[4];
  for (int k = 0; k <= 3; ++k) d[k] = pp.derivative(3 - k, k, x);
  double s = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) s += d[a + b + c] * u(a) * v(b) * w(c);
  return s;
}

double fourth(const PerturbedPhase& pp, const Eigen::Vector2d& x, const Eigen::Vector2d& u,
              const Eigen::Vector2d& v, const Eigen::Vector2d& w, const Eigen::Vector2d& z) {
  double d[5];
  for (int k = 0; k <= 4; ++k) d[k] = pp.derivative(4 - k, k, x);
  double s = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int e = 0; e < 2; ++e) s += d[a + b + c + e] * u(a) * v(b) * w(c) * z(e);
  return s;
}

namespace {

// Near a fold Newton stalls about sqrt(eps) away along the kernel. Gauss-Newton
// on the consistent system (grad = 0, det = 0) pins the point down.
Eigen::Vector2d polish_fold(const PerturbedPhase& pp, Eigen::Vector2d x, double tol_grad) {
  Eigen::Matrix2d h = hess(pp, x);
  if (std::abs(h.determinant()) > 1e-6 * h.squaredNorm()) return x;
  const Eigen::Vector2d start = x;
  for (int it = 0; it < 30; ++it) {
    h = hess(pp, x);
    double d3[4];
    for (int k = 0; k <= 3; ++k) d3[k] = pp.derivative(3 - k, k, x);
    Eigen::Matrix<double, 3, 2> J;
    J.topRows<2>() = h;
    J(2, 0) = d3[0] * h(1, 1) + h(0, 0) * d3[2] - 2 * h(0, 1) * d3[1];
    J(2, 1) = d3[1] * h(1, 1) + h(0, 0) * d3[3] - 2 * h(0, 1) * d3[2];
    Eigen::Vector3d r;
    r.head<2>() = grad(pp, x);
    r(2) = h.determinant();
    const Eigen::Vector2d step = J.colPivHouseholderQr().solve(r);
    if (!step.allFinite()) return start;
    x -= step;
    if (step.norm() <= 1e-16 * (1.0 + x.norm())) break;
  }
  return grad(pp, x).norm() <= tol_grad && (x - start).norm() < 1e-4 ? x : start;
}

}  // namespace

std::vector<CriticalPoint> critical_points(const PerturbedPhase& pp, const Box& box, int seeds_per_axis,
                                           const ClassifyTolerances& tol) {
  std::vector<CriticalPoint> found;
  const int k = std::max(seeds_per_axis, 2);
  const double m1 = 1e-9 * (box.x1_hi - box.x1_lo), m2 = 1e-9 * (box.x2_hi - box.x2_lo);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      Eigen::Vector2d x(box.x1_lo + (box.x1_hi - box.x1_lo) * a / (k - 1),
                        box.x2_lo + (box.x2_hi - box.x2_lo) * b / (k - 1));
      Eigen::Vector2d g = grad(pp, x);
      for (int it = 0; it < 200; ++it) {
        const Eigen::Matrix2d h = hess(pp, x);
        const double det = h.determinant();
        const Eigen::Vector2d step =
            det != 0.0 ? Eigen::Vector2d(h.inverse() * g) : Eigen::Vector2d(h.completeOrthogonalDecomposition().solve(g));
        if (!step.allFinite()) break;
        x -= step;
        g = grad(pp, x);
        if (!x.allFinite() || x.norm() > 1e6) break;
        if (step.norm() <= 1e-15 * (1.0 + x.norm())) break;
      }
      if (!x.allFinite() || !g.allFinite()) continue;
      if (x(0) < box.x1_lo - m1 || x(0) > box.x1_hi + m1 || x(1) < box.x2_lo - m2 || x(1) > box.x2_hi + m2)
        continue;
      if (g.norm() > tol.grad) continue;
      x = polish_fold(pp, x, tol.grad);
      g = grad(pp, x);
      CriticalPoint cp;
      cp.location = x;
      cp.gradient_norm = g.norm();
      cp.hess_det = hess(pp, x).determinant();
      found.push_back(cp);
    }
  std::sort(found.begin(), found.end(), [](const CriticalPoint& p, const CriticalPoint& q) {
    if (p.location(0) != q.location(0)) return p.location(0) < q.location(0);
    return p.location(1) < q.location(1);
  });
  std::vector<CriticalPoint> out;
  for (const auto& cp : found) {
    bool dup = false;
    for (auto& o : out)
      if ((o.location - cp.location).norm() <= tol.dedupe) {
        if (cp.gradient_norm < o.gradient_norm) o = cp;
        dup = true;
        break;
      }
    if (!dup) out.push_back(cp);
  }
  return out;
}

KernelJet kernel_jet(const PerturbedPhase& pp, const Eigen::Vector2d& x) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(hess(pp, x));
  const int k = std::abs(es.eigenvalues()(0)) <= std::abs(es.eigenvalues()(1)) ? 0 : 1;
  KernelJet j;
  j.v = es.eigenvectors().col(k);
  if (j.v(0) < 0 || (j.v(0) == 0 && j.v(1) < 0)) j.v = -j.v;
  const Eigen::Vector2d w = es.eigenvectors().col(1 - k);
  j.mu = es.eigenvalues()(1 - k);
  j.c3 = third(pp, x, j.v, j.v, j.v) / 6.0;
  const double b = third(pp, x, j.v, j.v, w) / 2.0;
  const double e = fourth(pp, x, j.v, j.v, j.v, j.v) / 24.0;
  j.c4 = j.mu != 0.0 ? e - b * b / (2.0 * j.mu) : e;
  return j;
}

namespace {

void check_band(double value, double threshold, CPType above, CPType below, const char* what) {
  if (value > threshold / 10.0 && value < threshold * 10.0)
    throw AmbiguousClassificationError(above, below,
                                       std::string(what) + " = " + fmt(value) + " near threshold " + fmt(threshold));
}

}  // namespace

CPType classify_critical_point(const PerturbedPhase& pp, CriticalPoint& cp, const ClassifyTolerances& tol) {
  const Eigen::Matrix2d h = hess(pp, cp.location);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h);
  const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  cp.hess_det = h.determinant();
  if (lmax <= tol.deg) {
    cp.type = CPType::HIGHER_OR_ORIGIN;
    return cp.type;
  }
  const double thr = tol.deg * h.norm();
  const double adet = std::abs(cp.hess_det);
  check_band(adet, thr, CPType::A1, CPType::A2, "|det Hess|");
  if (adet > thr) {
    cp.type = CPType::A1;
    return cp.type;
  }
  const KernelJet j = kernel_jet(pp, cp.location);
  cp.kernel_direction = j.v;
  check_band(std::abs(j.c3), tol.cubic, CPType::A2, CPType::A3, "|cubic|");
  if (std::abs(j.c3) > tol.cubic) {
    cp.type = CPType::A2;
    return cp.type;
  }
  check_band(std::abs(j.c4), tol.quartic, CPType::A3, CPType::HIGHER_OR_ORIGIN, "|quartic|");
  cp.type = std::abs(j.c4) > tol.quartic ? CPType::A3 : CPType::HIGHER_OR_ORIGIN;
  return cp.type;
}

bool a3_membership(double beta0, double omega0, double b1_0, int m) {
  if (b1_0 == 0.0) throw Error(ErrorKind::InvalidInvariants, "b1(0,0) = 0");
  if (m < 2) throw Error(ErrorKind::InvalidInvariants, "m < 2");
  const double t = -m * (m - 1) * b1_0 * omega0;
  if (t == 0.0) return false;
  const double target = -t * t / (4.0 * m * (2 * m + 1) * b1_0);
  return std::abs(beta0 - target) <= 1e-12 * std::max(std::abs(beta0), std::abs(target));
}

PerturbedPhase exceptional_rescaled(int m, double sigma1) {
  if (m < 2) throw Error(ErrorKind::InvalidInvariants, "m must be at least 2");
  Polynomial p = Polynomial::monomial(1, 2) - Polynomial::monomial(2 * m + 1, 0, Rational(1, 4 * m * (2 * m + 1))) +
                 Polynomial::monomial(m, 0, Rational(1, m * (m - 1)));
  return PerturbedPhase(DPhase::polynomial(p), Eigen::Vector2d(sigma1, 1.0));
}

double reference_sigma1(int m) {
  return static_cast<double>((m + 1) * (m + 1) * (2 * m - 5)) / (4.0 * m * (m - 1) * (2 * m + 1));
}

A3Witness find_a3_witness(int m) {
  const PerturbedPhase base = exceptional_rescaled(m, 0.0);
  // d2 Phi_1 = 2 y1 y2 - 1 forces y2 = 1/(2 y1); sigma1 is then fixed by d1 Phi_1 = 0.
  auto point = [](double y1) { return Eigen::Vector2d(y1, 0.5 / y1); };
  auto cubic = [&](double y1) {
    const Eigen::Vector2d y = point(y1);
    const Eigen::Matrix2d h = hess(base, y);
    const Eigen::Vector2d v = Eigen::Vector2d(h(1, 1), -h(0, 1)).normalized();
    return third(base, y, v, v, v) / 6.0;
  };
  const int samples = 4000;
  const double lo = std::log(0.25), hi = std::log(4.0);
  double prev_y = std::exp(lo), prev_c = cubic(prev_y);
  for (int k = 1; k <= samples; ++k) {
    const double y = std::exp(lo + (hi - lo) * k / samples);
    const double c = cubic(y);
    if ((prev_c <= 0) != (c <= 0)) {
      double a = prev_y, b = y, fa = prev_c;
      for (int it = 0; it < 200 && b - a > 1e-16 * b; ++it) {
        const double mid = 0.5 * (a + b), fm = cubic(mid);
        if ((fa <= 0) == (fm <= 0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      const double y1 = 0.5 * (a + b);
      const Eigen::Vector2d yv = point(y1);
      if (yv(1) >= 0.125 && yv(1) <= 4.0) {
        A3Witness w;
        w.point = yv;
        w.sigma0 = Eigen::Vector2d(grad(base, yv)(0), 1.0);
        const PerturbedPhase pp = exceptional_rescaled(m, w.sigma0(0));
        w.gradient_norm = grad(pp, yv).norm();
        w.hess_det = hess(pp, yv).determinant();
        const KernelJet j = kernel_jet(pp, yv);
        w.cubic = j.c3;
        w.quartic = j.c4;
        w.t = 1.0 / ipow(y1, m + 1);
        if (w.gradient_norm < 1e-10 && std::abs(w.hess_det) < 1e-9 && std::abs(w.cubic) < 1e-8 &&
            std::abs(w.quartic) > 1e-4)
          return w;
      }
    }
    prev_y = y;
    prev_c = c;
  }
  throw Error(ErrorKind::WitnessNotFound, "no A3 point in [1/4,4]x[1/8,4] for m = " + std::to_string(m));
}

}  // namespace dosc
