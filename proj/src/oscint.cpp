#include "dosc/oscint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "dosc/quadrature.hpp"

namespace dosc {

namespace {

using cd = std::complex<double>;

double bump_f(double z) { return z > 0.0 ? std::exp(-1.0 / z) : 0.0; }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double ipow(double x, int e) {
  double r = 1.0;
  for (int k = 0; k < e; ++k) r *= x;
  return r;
}

cd expi(double t) { return {std::cos(t), std::sin(t)}; }

void check_inputs(double lambda, const QuadratureConfig& cfg) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorKind::Config, "lambda must be positive and finite");
  if (!(cfg.abs_tol > 0.0) || !(cfg.rel_tol > 0.0)) throw Error(ErrorKind::Config, "tolerances must be positive");
  if (cfg.max_depth < 10) throw Error(ErrorKind::Config, "max_depth must be at least 10");
  if (!(cfg.c_osc > 0.0)) throw Error(ErrorKind::Config, "c_osc must be positive");
  gk_rule(cfg.panel_order);
}

double osc_cap(double c_osc, double lambda, double second) {
  return c_osc / (1.0 + std::sqrt(lambda * (1.0 + std::abs(second))));
}

AdaptiveOptions outer_options(const QuadratureConfig& cfg) { return {cfg.abs_tol, cfg.rel_tol, cfg.max_depth}; }

AdaptiveOptions inner_options(const QuadratureConfig& cfg, double outer_length) {
  return {0.25 * cfg.abs_tol / std::max(outer_length, 1e-300), 0.25 * cfg.rel_tol, cfg.max_depth};
}

OscSample finish(OscSample out, const AdaptiveResult& r, bool inner_ok, const QuadratureConfig& cfg) {
  out.value = r.value;
  out.err_est = r.err;
  const double tol = std::max(cfg.abs_tol, cfg.rel_tol * r.abs_mass);
  if (!std::isfinite(out.value.real()) || !std::isfinite(out.value.imag()))
    throw AccuracyNotReachedError(out, "non-finite integral value");
  if ((!r.converged || !inner_ok) && out.err_est > 10.0 * tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "max_depth exhausted: err_est %.3g exceeds 10 x tolerance %.3g", out.err_est, tol);
    throw AccuracyNotReachedError(out, buf);
  }
  return out;
}

}  // namespace

double chi0(double u) {
  const double a = std::abs(u);
  if (a <= 0.5) return 1.0;
  if (a >= 1.0) return 0.0;
  const double t = 2.0 * a - 1.0;
  const double p = bump_f(1.0 - t), q = bump_f(t);
  return p / (p + q);
}

double Amplitude::operator()(double x1, double x2) const {
  x2 -= x2_center(x1);
  x1 -= c1;
  switch (kind) {
    case Kind::ProductBump: return chi0(x1 / r1) * chi0(x2 / r2);
    case Kind::SmoothBump: return chi0(std::hypot(x1, x2) / r1);
    case Kind::Zero: return 0.0;
  }
  return 0.0;
}

double Amplitude::x2_extent(double x1) const {
  x1 -= c1;
  switch (kind) {
    case Kind::ProductBump: return std::abs(x1) < r1 ? r2 : 0.0;
    case Kind::SmoothBump: return std::abs(x1) < r1 ? std::sqrt(r1 * r1 - x1 * x1) : 0.0;
    case Kind::Zero: return 0.0;
  }
  return 0.0;
}

double Amplitude::x2_center(double x1) const {
  return sheared() ? c2 + shear * ipow(x1 - c1, shear_power) : c2;
}

std::string Amplitude::canonical() const {
  std::string centre = centered() ? "" : "|c=" + fmt(c1) + "," + fmt(c2);
  if (sheared()) centre += "|shear=" + fmt(shear) + "^" + std::to_string(shear_power);
  switch (kind) {
    case Kind::ProductBump: return "product_bump|r1=" + fmt(r1) + ";r2=" + fmt(r2) + centre + "|chi0=smoothstep_exp";
    case Kind::SmoothBump: return "smooth_bump|r=" + fmt(r1) + centre + "|chi0=smoothstep_exp";
    case Kind::Zero: return "zero";
  }
  return "";
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string QuadratureConfig::canonical() const {
  return "abs_tol=" + fmt(abs_tol) + ";rel_tol=" + fmt(rel_tol) + ";max_depth=" + std::to_string(max_depth) +
         ";panel_order=" + std::to_string(panel_order) + ";c_osc=" + fmt(c_osc);
}

std::uint64_t QuadratureConfig::hash() const { return fnv1a64(canonical()); }

const char* to_string(Engine e) { return e == Engine::DIRECT2D ? "DIRECT2D" : "REDUCED1D"; }

OscSample integrate_direct(const PerturbedPhase& pp, const Amplitude& a, double lambda, const QuadratureConfig& cfg) {
  check_inputs(lambda, cfg);
  OscSample out;
  out.lambda = lambda;
  out.s = pp.s;
  out.engine = Engine::DIRECT2D;
  out.cfg_hash = cfg.hash();
  if (a.kind == Amplitude::Kind::Zero) return out;

  const GKRule& rule = gk_rule(cfg.panel_order);
  const double R1 = a.x1_extent();
  const AdaptiveOptions oopt = outer_options(cfg);
  const AdaptiveOptions iopt = inner_options(cfg, 2.0 * R1);
  bool inner_ok = true;
  std::vector<double> c;
  std::vector<double> c2;  // coefficients of d2^2 Phi in x2

  Integrand inner_outer = [&](double x1, double& err) -> cd {
    const double e = a.x2_extent(x1);
    if (e <= 0.0) return 0.0;
    pp.x2_slice(x1, c);
    const int deg = static_cast<int>(c.size()) - 1;
    c2.assign(std::max(deg - 1, 1), 0.0);
    for (int j = 2; j <= deg; ++j) c2[j - 2] = j * (j - 1) * c[j];
    auto horner = [](const std::vector<double>& p, double x) {
      double v = 0.0;
      for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
      return v;
    };
    Integrand f = [&](double x2, double&) -> cd {
      const double amp = a(x1, x2);
      if (amp == 0.0) return 0.0;
      return amp * expi(lambda * horner(c, x2));
    };
    WidthCap cap = [&](double lo, double hi) { return osc_cap(cfg.c_osc, lambda, horner(c2, 0.5 * (lo + hi))); };
    const double mid = a.x2_center(x1);
    const AdaptiveResult r = integrate_adaptive(rule, f, mid - e, mid + e, iopt, cap);
    if (!r.converged) inner_ok = false;
    err = r.err;
    return r.value;
  };
  WidthCap outer_cap = [&](double lo, double hi) {
    const Eigen::Vector2d m(0.5 * (lo + hi), a.x2_center(0.5 * (lo + hi)));
    return osc_cap(cfg.c_osc, lambda, hess(pp, m).cwiseAbs().maxCoeff());
  };
  const AdaptiveResult r = integrate_adaptive(rule, inner_outer, a.c1 - R1, a.c1 + R1, oopt, outer_cap);
  return finish(out, r, inner_ok, cfg);
}

namespace {

// Phase b1 x1 y^2 + g(x1) - s2 y with the y integral folded onto [0, R2];
// g is dense in x1.
OscSample reduced_core(double b1, const std::vector<double>& g, const Eigen::Vector2d& s, double lambda,
                       const QuadratureConfig& cfg, const Amplitude& a) {
  check_inputs(lambda, cfg);
  if (a.kind == Amplitude::Kind::SmoothBump || !a.centered())
    throw Error(ErrorKind::Config, "reduced engine needs a product amplitude centred at the origin");
  OscSample out;
  out.lambda = lambda;
  out.s = s;
  out.engine = Engine::REDUCED1D;
  out.cfg_hash = cfg.hash();
  if (a.kind == Amplitude::Kind::Zero) return out;

  const GKRule& rule = gk_rule(cfg.panel_order);
  const double R1 = a.r1, R2 = a.r2;
  const AdaptiveOptions oopt = outer_options(cfg);
  const AdaptiveOptions iopt = inner_options(cfg, 2.0 * R1);
  const double s2 = s(1);
  std::vector<double> g2(g.size() > 2 ? g.size() - 2 : 1, 0.0);
  for (std::size_t k = 2; k < g.size(); ++k) g2[k - 2] = k * (k - 1.0) * g[k];
  auto horner = [](const std::vector<double>& p, double x) {
    double v = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
    return v;
  };
  bool inner_ok = true;

  // e^(i lambda b1 x1 y^2) is even in y and e^(-i lambda s2 y) folds to a cosine.
  Integrand outer = [&](double x1, double& err) -> cd {
    Integrand f = [&](double y, double&) -> cd {
      const double amp = chi0(y / R2);
      if (amp == 0.0) return 0.0;
      return 2.0 * amp * std::cos(lambda * s2 * y) * expi(lambda * b1 * x1 * y * y);
    };
    WidthCap cap = [&](double, double) { return osc_cap(cfg.c_osc, lambda, 2.0 * b1 * x1); };
    const AdaptiveResult r = integrate_adaptive(rule, f, 0.0, R2, iopt, cap);
    if (!r.converged) inner_ok = false;
    const double amp1 = chi0(x1 / R1);
    err = amp1 * r.err;
    return amp1 * expi(lambda * horner(g, x1)) * r.value;
  };
  WidthCap outer_cap = [&](double lo, double hi) {
    const double h = std::abs(horner(g2, 0.5 * (lo + hi)));
    return osc_cap(cfg.c_osc, lambda, std::max(h, 2.0 * std::abs(b1) * R2));
  };
  const AdaptiveResult r = integrate_adaptive(rule, outer, -R1, R1, oopt, outer_cap);
  return finish(out, r, inner_ok, cfg);
}

void add_coef(std::vector<double>& g, int k, double c) {
  if (static_cast<int>(g.size()) <= k) g.resize(k + 1, 0.0);
  g[k] += c;
}

}  // namespace

OscSample integrate_reduced_model(std::optional<int> n, int sign, const Eigen::Vector2d& s, double lambda,
                                  const QuadratureConfig& cfg, const Amplitude& a) {
  if (a.sheared()) throw Error(ErrorKind::Config, "model phases use an unsheared amplitude");
  std::vector<double> g{0.0, -s(0)};
  if (n) add_coef(g, *n, sign);
  return reduced_core(1.0, g, s, lambda, cfg, a);
}

OscSample integrate_reduced_normal_form(const DPhase& phase, const Eigen::Vector2d& s, double lambda,
                                        const QuadratureConfig& cfg, const Amplitude& a) {
  if (phase.mode != PhaseMode::NormalForm || phase.b2_0 != 0.0 || !phase.s2_coupling.empty())
    throw Error(ErrorKind::Config, "reduced engine needs a normal form with b2 = 0");
  const bool curved = phase.m && phase.omega0 != 0.0;
  if (curved ? (a.shear != phase.omega0 || a.shear_power != *phase.m) : a.sheared())
    throw Error(ErrorKind::Config, "amplitude must be the adapted product bump of the normal form");
  // x2 = y + omega0 x1^m: s2 x2 contributes s2 omega0 x1^m to the outer phase.
  std::vector<double> g{0.0, -s(0)};
  if (phase.n) add_coef(g, *phase.n, phase.beta0);
  if (curved) add_coef(g, *phase.m, -s(1) * phase.omega0);
  return reduced_core(phase.b1_0, g, s, lambda, cfg, a);
}

OscSample integrate(const PerturbedPhase& pp, const Amplitude& a, double lambda, Engine engine,
                    const QuadratureConfig& cfg) {
  if (engine == Engine::DIRECT2D) return integrate_direct(pp, a, lambda, cfg);
  if (!pp.base.s2_coupling.empty()) throw Error(ErrorKind::Config, "reduced engine has no s2 coupling");
  if (pp.base.mode == PhaseMode::Model) return integrate_reduced_model(pp.base.n, pp.base.sign, pp.s, lambda, cfg, a);
  if (pp.base.mode == PhaseMode::NormalForm) return integrate_reduced_normal_form(pp.base, pp.s, lambda, cfg, a);
  throw Error(ErrorKind::Config, "reduced engine applies to model and normal form phases only");
}

double van_der_corput_probe(int k, const std::vector<double>& lambdas, const Amplitude& a,
                            const QuadratureConfig& cfg) {
  if (k < 2) throw Error(ErrorKind::Config, "van der Corput probe needs k >= 2");
  if (a.kind == Amplitude::Kind::Zero) return 0.0;
  const GKRule& rule = gk_rule(cfg.panel_order);
  const double r = a.r1;
  double best = 0.0;
  for (double lambda : lambdas) {
    check_inputs(lambda, cfg);
    Integrand f = [&](double x, double&) -> cd { return chi0(x / r) * expi(lambda * ipow(x, k)); };
    WidthCap cap = [&](double lo, double hi) {
      return osc_cap(cfg.c_osc, lambda, k * (k - 1) * ipow(0.5 * (lo + hi), k - 2));
    };
    const AdaptiveResult res = integrate_adaptive(rule, f, -r, r, outer_options(cfg), cap);
    best = std::max(best, std::pow(lambda, 1.0 / k) * std::abs(res.value));
  }
  return best;
}

double amplitude_mass(const Amplitude& a) {
  const GKRule& rule = gk41();
  const AdaptiveOptions opt{1e-15, 1e-14, 40};
  switch (a.kind) {
    case Amplitude::Kind::Zero: return 0.0;
    case Amplitude::Kind::ProductBump: {
      Integrand f = [](double u, double&) -> cd { return chi0(u); };
      const double m0 = integrate_adaptive(rule, f, -1.0, 1.0, opt).value.real();
      return a.r1 * a.r2 * m0 * m0;
    }
    case Amplitude::Kind::SmoothBump: {
      Integrand f = [](double u, double&) -> cd { return chi0(u) * u; };
      return 2.0 * M_PI * a.r1 * a.r1 * integrate_adaptive(rule, f, 0.0, 1.0, opt).value.real();
    }
  }
  return 0.0;
}

}  // namespace dosc
