#include <doctest.h>

#include <cmath>

#include "dosc/errors.hpp"
#include "dosc/quadrature.hpp"
#include "dosc/special.hpp"

using namespace dosc;
using cd = std::complex<double>;

TEST_CASE("Gauss-Kronrod rules integrate monomials exactly up to their degree") {
  for (int order : {21, 41}) {
    const GKRule& rule = gk_rule(order);
    const int gauss_points = (order - 1) / 2;
    const int kronrod_degree = 3 * gauss_points + 1;
    for (int k = 0; k <= kronrod_degree; ++k) {
      Integrand f = [k](double x, double&) -> cd { return std::pow(x, k); };
      const PanelEstimate e = gk_panel(rule, f, 0.0, 1.0);
      CHECK(e.kronrod.real() == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
      if (k <= 2 * gauss_points - 1) CHECK(e.gauss.real() == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
    }
  }
}

TEST_CASE("weights sum to the interval length") {
  Integrand one = [](double, double&) -> cd { return 1.0; };
  const PanelEstimate e = gk_panel(gk41(), one, -1.0, 1.0);
  CHECK(e.kronrod.real() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(e.gauss.real() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(e.abs_mass == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("unsupported panel order is a configuration error") {
  CHECK_THROWS_AS(gk_rule(33), Error);
}

TEST_CASE("adaptive integration of an oscillatory exponential") {
  const double w = 300.0;
  Integrand f = [w](double x, double&) -> cd { return {std::cos(w * x), std::sin(w * x)}; };
  const AdaptiveResult r = integrate_adaptive(gk41(), f, 0.0, 1.0, {1e-13, 1e-12, 40});
  const cd exact = (cd(std::cos(w), std::sin(w)) - 1.0) / cd(0.0, w);
  CHECK(std::abs(r.value - exact) < 1e-12);
  CHECK(r.converged);
  CHECK(r.err < 1e-11);
  CHECK(r.panels > 1);
}

TEST_CASE("inner error reports are accumulated") {
  Integrand f = [](double, double& err) -> cd {
    err = 1e-3;
    return 1.0;
  };
  const AdaptiveResult r = integrate_adaptive(gk21(), f, 0.0, 2.0, {1e-12, 1e-12, 20});
  CHECK(r.err == doctest::Approx(2e-3));
}

TEST_CASE("width cap forces subdivision") {
  Integrand f = [](double x, double&) -> cd { return x; };
  const AdaptiveResult r = integrate_adaptive(gk21(), f, 0.0, 1.0, {1e-12, 1e-12, 20},
                                              [](double, double) { return 0.1; });
  CHECK(r.panels == 16);
  CHECK(r.value.real() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("max depth exhaustion is reported") {
  Integrand f = [](double x, double&) -> cd { return std::sqrt(std::abs(x - 0.3)); };
  const AdaptiveResult r = integrate_adaptive(gk21(), f, 0.0, 1.0, {1e-300, 1e-300, 10});
  CHECK_FALSE(r.converged);
}

TEST_CASE("adaptive integration is bit reproducible") {
  Integrand f = [](double x, double&) -> cd { return {std::cos(50 * x * x), std::sin(50 * x * x)}; };
  const AdaptiveResult a = integrate_adaptive(gk41(), f, -1.0, 1.0, {1e-12, 1e-10, 40});
  const AdaptiveResult b = integrate_adaptive(gk41(), f, -1.0, 1.0, {1e-12, 1e-10, 40});
  CHECK(a.value == b.value);
  CHECK(a.err == b.err);
}

TEST_CASE("gamma function special values") {
  CHECK(gamma_function(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gamma_function(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
  CHECK_THROWS_AS(gamma_function(0.0), Error);
  CHECK_THROWS_AS(gamma_function(-0.5), Error);
}

TEST_CASE("gamma function identities") {
  for (double z : {1.0 / 6, 1.0 / 8, 0.3, 0.45}) {
    // reflection
    CHECK(gamma_function(z) * gamma_function(1 - z) == doctest::Approx(M_PI / std::sin(M_PI * z)).epsilon(1e-12));
    // duplication, Gamma(z) Gamma(z + 1/2) = 2^(1-2z) sqrt(pi) Gamma(2z)
    CHECK(gamma_function(z) * gamma_function(z + 0.5) ==
          doctest::Approx(std::pow(2.0, 1 - 2 * z) * std::sqrt(M_PI) * gamma_function(2 * z)).epsilon(1e-12));
  }
}
