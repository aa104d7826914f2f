#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "dosc/cache.hpp"
#include "dosc/normalform.hpp"
#include "dosc/oscint.hpp"
#include "dosc/rational.hpp"

namespace dosc {

/// rho(s) = |s1|^(n/(n-1)) + |s2|^(2n/(n+1)).
double quasi_distance(const Eigen::Vector2d& s, int n);

/// delta*_t s = (t^((n-1)/n) s1, t^((n+1)/(2n)) s2), so rho(delta*_t s) = t rho(s).
Eigen::Vector2d quasi_dilation(double t, const Eigen::Vector2d& s, int n);

/// Point with rho = t on the ray of angle theta.
Eigen::Vector2d quasi_polar(double t, double theta, int n);

struct LambdaGrid {
  double lambda0 = 2.0;
  int levels = 13;

  void validate() const;
  std::vector<double> values() const;
  std::string canonical() const;
};

struct SCell {
  int j = 0;      // annulus 2^(-j-1) <= rho <= 2^(-j)
  int index = 0;  // position inside the annulus
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double area = 0.0;
};

/// Quasi-polar cells: each annulus is cut into equal angle sectors.
struct SGrid {
  int n_rho = 3;
  int j_min = 2;
  int j_max = 8;
  int cells_per_annulus = 16;

  void validate() const;
  /// Ordered by (j, index).
  std::vector<SCell> cells() const;
  std::string canonical() const;
};

/// Phase, amplitude, engine and quadrature settings behind every sample.
struct Sampler {
  DPhase phase;
  Amplitude amplitude = Amplitude::product(0.5);
  Engine engine = Engine::REDUCED1D;
  QuadratureConfig cfg;
  SampleCache* cache = nullptr;

  std::uint64_t phase_hash() const;
  /// Throws AccuracyNotReachedError.
  OscSample sample(double lambda, const Eigen::Vector2d& s) const;
};

struct RandolEntry {
  double value = 0.0;  // lower approximation of M_gamma
  double argmax_lambda = 0.0;
  double max_err = 0.0;
  bool flagged = false;
};

RandolEntry randol_value(const Sampler& sampler, double gamma, const Eigen::Vector2d& s, const LambdaGrid& grid);
RandolEntry randol_value(const Sampler& sampler, double gamma, const Eigen::Vector2d& s,
                         const std::vector<double>& lambdas);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS
  int points = 0;
};

/// Least squares y = slope x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Fit of log|I| against log lambda; needs 6 accepted samples.
LineFit decay_fit(const Sampler& sampler, const Eigen::Vector2d& s, const LambdaGrid& grid);

/// |I| over the lambda grid for every cell; reused for several gamma.
struct FieldSamples {
  SGrid grid;
  LambdaGrid lambdas;
  std::vector<SCell> cells;
  std::vector<std::vector<double>> abs_values;  // [cell][level]
  std::vector<std::vector<double>> errors;
  std::vector<bool> flagged;
};

/// Parallel over cells with `threads` workers (0 = hardware concurrency).
FieldSamples sample_field(const Sampler& sampler, const SGrid& grid, const LambdaGrid& lambdas, int threads = 0);

struct MaximalField {
  double gamma = 1.0;
  SGrid grid;
  std::vector<SCell> cells;
  std::vector<RandolEntry> entries;
  std::vector<int> flagged_per_annulus;  // indexed by j - j_min
};

/// Throws AnnulusUnreliable when an annulus has more than 20% flagged cells.
MaximalField maximal_field(const FieldSamples& samples, double gamma);
MaximalField maximal_field(const Sampler& sampler, double gamma, const SGrid& grid, const LambdaGrid& lambdas,
                           int threads = 0);

/// Slope of log2(max over annulus j) against j for j in [j_lo, j_hi].
LineFit annulus_growth(const MaximalField& field, int j_lo, int j_hi);

// Critical exponents.
Rational la_exponent(const Rational& gamma, int n);
Rational exceptional_upper_exponent(const Rational& gamma);
Rational nla_lower_exponent(const Rational& gamma, int n, int m);
Rational nla_upper_exponent(const Rational& gamma, int m);
Rational d_inf_exponent(const Rational& gamma);

/// Admissible gamma: ((n+1)/(2n), 1], or (1/2, (m+3)/(2(m+1))] for D_INF.
bool gamma_in_range(Regime regime, const Rational& gamma, std::optional<int> n, std::optional<int> m);

/// Throws GammaOutOfRange or InvalidInvariants.
Rational predicted_critical_p(Regime regime, const Rational& gamma, std::optional<int> n, std::optional<int> m);

/// Both NLA branches give 2(m+1) at (m+3)/(2(m+1)) and both EXCEPTIONAL
/// branches give (3n-2)/(n-2) at (3n-3)/(3n-2).
bool breakpoint_consistency(int n, int m);

/// Exponent used for the annulus geometry: 2m+1 on the NLA upper branch, n otherwise.
int annulus_exponent(Regime regime, const Rational& gamma, std::optional<int> n, std::optional<int> m);

enum class Verdict { CONSISTENT, INCONSISTENT, INCONCLUSIVE };
const char* to_string(Verdict v);

struct AnnulusSum {
  double q = 0.0;
  int j = 0;
  double sum = 0.0;
};

struct ExponentReport {
  Regime regime = Regime::LA;
  double gamma = 1.0;
  std::optional<Rational> p_star_predicted;
  std::optional<double> p_hat_empirical;
  std::vector<AnnulusSum> per_annulus_sums;
  double fit_residual = 0.0;
  Verdict verdict = Verdict::INCONCLUSIVE;
  std::string note;
  int j_lo = 0;
  int j_hi = 0;
};

struct LpProbeOptions {
  double tolerance = 0.35;
  std::optional<int> j_lo;
  std::optional<int> j_hi;
};

/// S_j(q) = sum of M^q * area over unflagged cells (rescaled to the full
/// annulus area); a(q) = slope of log2 S_j in j; p_hat is the root of a.
ExponentReport lp_probe(const MaximalField& field, const std::vector<double>& q_grid, Regime regime,
                        std::optional<Rational> p_star, const LpProbeOptions& opt = {});

/// "A:B:STEP"
std::vector<double> parse_q_grid(const std::string& text);

struct ExceptionalScanConfig {
  int m = 2;
  double gamma = 1.0;
  double window = 0.25;        // amplitude radius around the witness point, rescaled coordinates
  double delta_max = 0.125;    // largest offset sigma1 - sigma1^0
  int delta_levels = 9;        // offsets delta_max 2^-k
  double fit_delta_max = 1.0 / 128;  // across fit uses offsets up to this; 0 uses all
  LambdaGrid lambdas{2.0, 16}; // rescaled frequencies
  int lambda_substeps = 4;     // across the curve: lambda0 2^(k/substeps)
  double lambda_cap = 64.0;    // across the curve: lambda <= cap |delta|^(-4/3); 0 disables
  std::vector<double> s2_values{1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512, 1.0 / 1024, 1.0 / 2048};
  double along_delta = 0.0625; // offset used along the curve
  QuadratureConfig cfg;
};

struct ExceptionalScanRow {
  std::string kind;  // "across+", "across-" or "along"
  double s1 = 0.0;
  double s2 = 0.0;
  double delta = 0.0;
  RandolEntry entry;
};

struct ExceptionalReport {
  A3Witness witness;
  double gamma = 1.0;
  double across_exponent = 0.0;  // both sides of the curve in one fit
  double across_exponent_all = 0.0;  // same fit over every offset
  double across_exponent_plus = 0.0;
  double across_exponent_minus = 0.0;
  double across_predicted = 0.0;
  double across_residual = 0.0;
  double along_exponent = 0.0;
  double along_predicted = 0.0;
  double along_residual = 0.0;
  std::vector<ExceptionalScanRow> rows;
};

/// Blow-up near the curve s1 = sigma1^0 |s2|^(2m/(m+1)); samples use an
/// amplitude localized at the A3 point in rescaled coordinates.
ExceptionalReport exceptional_blowup_scan(const ExceptionalScanConfig& cfg, SampleCache* cache = nullptr);

}  // namespace dosc
