#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dosc/phase.hpp"

namespace dosc {

/// Smooth step: 1 on |u| <= 1/2, 0 on |u| >= 1, built from exp(-1/z).
double chi0(double u);

struct Amplitude {
  enum class Kind { ProductBump, SmoothBump, Zero };
  Kind kind = Kind::ProductBump;
  double r1 = 0.5;  // radius in x1 (also the radial radius for SmoothBump)
  double r2 = 0.5;  // radius in x2
  double c1 = 0.0;  // centre
  double c2 = 0.0;
  double shear = 0.0;  // support follows x2 = c2 + shear (x1 - c1)^shear_power
  int shear_power = 0;

  static Amplitude product(double r) { return {Kind::ProductBump, r, r}; }
  static Amplitude product(double r1, double r2) { return {Kind::ProductBump, r1, r2}; }
  static Amplitude smooth(double r) { return {Kind::SmoothBump, r, r}; }
  static Amplitude zero() { return {Kind::Zero, 0.5, 0.5}; }
  Amplitude centered_at(double x1, double x2) const {
    Amplitude a = *this;
    a.c1 = x1;
    a.c2 = x2;
    return a;
  }
  /// Product bump in the adapted coordinates (x1, x2 - omega x1^m).
  static Amplitude adapted(double r, double omega, int m) {
    Amplitude a = product(r);
    a.shear = omega;
    a.shear_power = m;
    return a;
  }
  bool centered() const { return c1 == 0.0 && c2 == 0.0; }
  bool sheared() const { return shear != 0.0; }

  double operator()(double x1, double x2) const;
  /// Half-length of the x1 support around c1.
  double x1_extent() const { return r1; }
  /// Half-length of the x2 support around c2 at fixed x1 (0 outside the support).
  double x2_extent(double x1) const;
  double x2_center(double x1) const;
  std::string canonical() const;
};

struct QuadratureConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_depth = 40;
  int panel_order = 41;
  double c_osc = 8.0;

  std::string canonical() const;
  std::uint64_t hash() const;
};

enum class Engine { DIRECT2D, REDUCED1D };
const char* to_string(Engine e);

struct OscSample {
  double lambda = 0.0;
  Eigen::Vector2d s = Eigen::Vector2d::Zero();
  std::complex<double> value;
  double err_est = 0.0;
  Engine engine = Engine::DIRECT2D;
  std::uint64_t cfg_hash = 0;
};

class AccuracyNotReachedError : public Error {
 public:
  AccuracyNotReachedError(const OscSample& s, const std::string& what)
      : Error(ErrorKind::AccuracyNotReached, what), partial(s) {}
  OscSample partial;
};

/// Iterated adaptive quadrature, outer x1 and inner x2.
OscSample integrate_direct(const PerturbedPhase& pp, const Amplitude& a, double lambda,
                           const QuadratureConfig& cfg = {});

/// Model phase x1 x2^2 + sign x1^n with the x2 integral folded onto [0, r2].
/// n = nullopt drops the x1^n term. Requires a product amplitude.
OscSample integrate_reduced_model(std::optional<int> n, int sign, const Eigen::Vector2d& s, double lambda,
                                  const QuadratureConfig& cfg = {}, const Amplitude& a = Amplitude::product(0.5));

/// Normal form b1 x1 (x2 - omega0 x1^m)^2 + beta0 x1^n with b2 = 0. The shear
/// x2 -> x2 - omega0 x1^m turns it into the model structure, so the amplitude
/// must be the matching adapted product bump.
OscSample integrate_reduced_normal_form(const DPhase& phase, const Eigen::Vector2d& s, double lambda,
                                        const QuadratureConfig& cfg, const Amplitude& a);

/// Dispatches to the reduced engine for model phases and for normal forms
/// with b2 = 0.
OscSample integrate(const PerturbedPhase& pp, const Amplitude& a, double lambda, Engine engine,
                    const QuadratureConfig& cfg = {});

/// max over the grid of lambda^(1/k) |int chi0(x/r) e^(i lambda x^k) dx|, r = a.r1.
double van_der_corput_probe(int k, const std::vector<double>& lambdas, const Amplitude& a = Amplitude::product(0.5),
                            const QuadratureConfig& cfg = {});

/// Integral of the amplitude over the plane.
double amplitude_mass(const Amplitude& a);

/// Hash of a configuration string (FNV-1a, 64 bit).
std::uint64_t fnv1a64(const std::string& text);

}  // namespace dosc
