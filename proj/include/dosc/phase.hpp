#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "dosc/polynomial.hpp"

namespace dosc {

enum class PhaseMode { Model, NormalForm, Polynomial };

/// Concrete phase phi. The perturbed phase is
///   Phi(x, s) = phi(x) - s1 x1 - s2 x2 + s2 * kappa(x),
/// where kappa (`s2_coupling`) is empty except for the exceptional example.
struct DPhase {
  PhaseMode mode = PhaseMode::Model;
  std::optional<int> n = 3;  // nullopt is the D_inf case
  int sign = 1;
  std::optional<int> m;
  double omega0 = 0.0;
  double beta0 = 1.0;
  double b1_0 = 1.0;
  double b2_0 = 0.0;
  Polynomial poly;
  std::vector<NumericTerm> s2_coupling;

  static DPhase model(std::optional<int> n, int sign);
  /// (b1 x1 + b2 x2^2)(x2 - omega0 x1^m)^2 + beta0 x1^n
  static DPhase normal_form(std::optional<int> n, std::optional<int> m, double omega0, double beta0,
                            double b1_0, double b2_0 = 0.0);
  static DPhase polynomial(const Polynomial& p);
  /// x1 x2^2 - x1^(2m+1)/(4m(2m+1)) with kappa = x1^m/(m(m-1)).
  static DPhase exceptional_example(int m);

  /// Monomials of phi in double precision.
  std::vector<NumericTerm> terms() const;
  /// Stable textual form used for hashing.
  std::string canonical() const;
};

/// Phi(., s) compiled into a monomial list.
struct PerturbedPhase {
  DPhase base;
  Eigen::Vector2d s = Eigen::Vector2d::Zero();
  std::vector<NumericTerm> terms;

  PerturbedPhase() = default;
  PerturbedPhase(const DPhase& phase, const Eigen::Vector2d& s);

  /// d1^a d2^b Phi at x.
  double derivative(int a, int b, const Eigen::Vector2d& x) const;
  /// Coefficients C_j with Phi(x1, x2) = sum_j C_j x2^j.
  void x2_slice(double x1, std::vector<double>& c) const;
  int degree_in_x2() const { return max_j_; }

 private:
  int max_j_ = 0;
};

double eval(const PerturbedPhase& pp, const Eigen::Vector2d& x);
Eigen::Vector2d grad(const PerturbedPhase& pp, const Eigen::Vector2d& x);
Eigen::Matrix2d hess(const PerturbedPhase& pp, const Eigen::Vector2d& x);
/// D^3 Phi(u, v, w) and D^4 Phi(u, v, w, z).
double third(const PerturbedPhase& pp, const Eigen::Vector2d& x, const Eigen::Vector2d& u,
             const Eigen::Vector2d& v, const Eigen::Vector2d& w);
double fourth(const PerturbedPhase& pp, const Eigen::Vector2d& x, const Eigen::Vector2d& u,
              const Eigen::Vector2d& v, const Eigen::Vector2d& w, const Eigen::Vector2d& z);

enum class CPType { A1, A2, A3, HIGHER_OR_ORIGIN };
const char* to_string(CPType t);

struct CriticalPoint {
  Eigen::Vector2d location = Eigen::Vector2d::Zero();
  double gradient_norm = 0.0;
  double hess_det = 0.0;
  CPType type = CPType::HIGHER_OR_ORIGIN;
  Eigen::Vector2d kernel_direction = Eigen::Vector2d::Zero();
};

struct Box {
  double x1_lo, x1_hi, x2_lo, x2_hi;
};

struct ClassifyTolerances {
  double grad = 1e-10;
  double deg = 1e-8;  // relative to the Hessian norm
  double cubic = 1e-8;
  double quartic = 1e-8;
  double dedupe = 1e-6;
};

/// Thrown when a classification value sits within 10x of its threshold.
class AmbiguousClassificationError : public Error {
 public:
  AmbiguousClassificationError(CPType a, CPType b, const std::string& what)
      : Error(ErrorKind::AmbiguousClassification, what), first(a), second(b) {}
  CPType first;
  CPType second;
};

/// Newton from a seeds_per_axis^2 grid; sorted by location and deduplicated.
std::vector<CriticalPoint> critical_points(const PerturbedPhase& pp, const Box& box, int seeds_per_axis = 33,
                                           const ClassifyTolerances& tol = {});

/// Also fills cp.kernel_direction when the Hessian is singular.
CPType classify_critical_point(const PerturbedPhase& pp, CriticalPoint& cp, const ClassifyTolerances& tol = {});

/// Restricted cubic and corrected quartic coefficients along the kernel.
struct KernelJet {
  Eigen::Vector2d v;
  double mu;  // nonzero eigenvalue
  double c3;
  double c4;
};
KernelJet kernel_jet(const PerturbedPhase& pp, const Eigen::Vector2d& x);

bool a3_membership(double beta0, double omega0, double b1_0, int m);

struct A3Witness {
  double t = 0.0;
  Eigen::Vector2d sigma0 = Eigen::Vector2d::Zero();
  Eigen::Vector2d point = Eigen::Vector2d::Zero();
  double gradient_norm = 0.0;
  double hess_det = 0.0;
  double cubic = 0.0;
  double quartic = 0.0;
};

/// Rescaled exceptional example with sigma2 = 1 and parameter sigma1.
PerturbedPhase exceptional_rescaled(int m, double sigma1);
A3Witness find_a3_witness(int m);

/// Closed form (m+1)^2 (2m-5) / (4m(m-1)(2m+1)), reported for comparison only.
double reference_sigma1(int m);

template <class T>
Eigen::Matrix<T, 2, 1> dilate(const Eigen::Matrix<T, 2, 1>& x, T r, T k1, T k2) {
  if (!(r > T(0))) throw Error(ErrorKind::InvalidScale, "dilation parameter must be positive");
  using std::pow;
  return {pow(r, k1) * x(0), pow(r, k2) * x(1)};
}

const char* to_string(PhaseMode m);

}  // namespace dosc
