#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace dosc {

/// Gauss-Kronrod pair on [-1, 1]. Abscissae are stored for the right half,
/// descending, with the centre last; Gauss nodes sit at odd indices.
struct GKRule {
  const double* xgk;
  const double* wgk;
  const double* wg;
  int half;  // number of Kronrod abscissae in the right half including the centre
  int order() const { return 2 * half - 1; }
};

const GKRule& gk41();
const GKRule& gk21();
const GKRule& gk_rule(int order);

struct PanelEstimate {
  std::complex<double> kronrod;
  std::complex<double> gauss;
  double abs_mass = 0.0;  // Kronrod estimate of the integral of |f|
  double inner_err = 0.0; // weighted sum of error reports from f
};

/// f(x, &err) returns the integrand and may add an error contribution of its own.
using Integrand = std::function<std::complex<double>(double, double&)>;

/// Panel size cap on [a, b]; return +inf for none.
using WidthCap = std::function<double(double a, double b)>;

PanelEstimate gk_panel(const GKRule& rule, const Integrand& f, double a, double b);

struct AdaptiveResult {
  std::complex<double> value;
  double err = 0.0;        // sum over panels of |K - G| plus reported inner errors
  double abs_mass = 0.0;
  int panels = 0;
  bool converged = true;   // false when max_depth stopped a panel short of tolerance
};

struct AdaptiveOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_depth = 40;
};

/// Depth-first bisection in a fixed order, so results are reproducible.
AdaptiveResult integrate_adaptive(const GKRule& rule, const Integrand& f, double a, double b,
                                  const AdaptiveOptions& opt, const WidthCap& cap = {});

}  // namespace dosc
