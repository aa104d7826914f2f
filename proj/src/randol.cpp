#include "dosc/randol.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "dosc/quadrature.hpp"

namespace dosc {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_n(int n) {
  if (n < 3) throw Error(ErrorKind::Config, "quasi-distance needs a finite n >= 3");
}

// Weight of the angular part of the quasi-polar Jacobian.
double angular_weight(double theta, int n) {
  const double k = (n * n - 1.0) / (n * n);
  return k * std::pow(std::abs(std::cos(theta)), (n - 2.0) / n) * std::pow(std::abs(std::sin(theta)), 1.0 / n);
}

double angular_integral(double lo, double hi, int n) {
  Integrand f = [n](double t, double&) -> std::complex<double> { return angular_weight(t, n); };
  return integrate_adaptive(gk21(), f, lo, hi, {1e-15, 1e-13, 50}).value.real();
}

template <class F>
void parallel_for(int count, int threads, F&& body) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, std::max(count, 1));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

double log_sum_exp2(const std::vector<double>& logs) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : logs) hi = std::max(hi, v);
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double v : logs) acc += std::exp2(v - hi);
  return hi + std::log2(acc);
}

}  // namespace

double quasi_distance(const Eigen::Vector2d& s, int n) {
  require_n(n);
  return std::pow(std::abs(s(0)), n / (n - 1.0)) + std::pow(std::abs(s(1)), 2.0 * n / (n + 1.0));
}

Eigen::Vector2d quasi_dilation(double t, const Eigen::Vector2d& s, int n) {
  require_n(n);
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidScale, "dilation parameter must be positive");
  return {std::pow(t, (n - 1.0) / n) * s(0), std::pow(t, (n + 1.0) / (2.0 * n)) * s(1)};
}

Eigen::Vector2d quasi_polar(double t, double theta, int n) {
  require_n(n);
  const double c = std::cos(theta), s = std::sin(theta);
  // |c1|^(n/(n-1)) = cos^2 and |c2|^(2n/(n+1)) = sin^2
  const Eigen::Vector2d unit(std::copysign(std::pow(std::abs(c), 2.0 * (n - 1.0) / n), c),
                             std::copysign(std::pow(std::abs(s), (n + 1.0) / n), s));
  return quasi_dilation(t, unit, n);
}

void LambdaGrid::validate() const {
  if (levels < 1) throw Error(ErrorKind::Config, "lambda grid is empty");
  if (!(lambda0 >= 2.0) || !std::isfinite(lambda0)) throw Error(ErrorKind::Config, "lambda0 must be at least 2");
}

std::vector<double> LambdaGrid::values() const {
  validate();
  std::vector<double> v;
  for (int j = 0; j < levels; ++j) v.push_back(std::ldexp(lambda0, j));
  return v;
}

std::string LambdaGrid::canonical() const { return "lambda0=" + fmt(lambda0) + ";levels=" + std::to_string(levels); }

void SGrid::validate() const {
  require_n(n_rho);
  if (j_max < j_min) throw Error(ErrorKind::Config, "annulus range is empty");
  if (cells_per_annulus < 1) throw Error(ErrorKind::Config, "cells_per_annulus must be positive");
}

std::vector<SCell> SGrid::cells() const {
  validate();
  const int n = n_rho;
  const double c = (3.0 * n - 1.0) / (2.0 * n);
  const int K = cells_per_annulus;
  std::vector<double> angular(K);
  for (int k = 0; k < K; ++k) angular[k] = angular_integral(2 * M_PI * k / K, 2 * M_PI * (k + 1) / K, n);
  std::vector<SCell> out;
  for (int j = j_min; j <= j_max; ++j) {
    const double lo = std::ldexp(1.0, -j - 1), hi = std::ldexp(1.0, -j);
    const double radial = (std::pow(hi, c) - std::pow(lo, c)) / c;
    for (int k = 0; k < K; ++k) {
      SCell cell;
      cell.j = j;
      cell.index = k;
      cell.center = quasi_polar(std::sqrt(lo * hi), 2 * M_PI * (k + 0.5) / K, n);
      cell.area = radial * angular[k];
      out.push_back(cell);
    }
  }
  return out;
}

std::string SGrid::canonical() const {
  return "n_rho=" + std::to_string(n_rho) + ";j=" + std::to_string(j_min) + ".." + std::to_string(j_max) +
         ";cells=" + std::to_string(cells_per_annulus);
}

std::uint64_t Sampler::phase_hash() const { return fnv1a64(phase.canonical() + "|" + amplitude.canonical()); }

OscSample Sampler::sample(double lambda, const Eigen::Vector2d& s) const {
  const CacheKey key{phase_hash(), cfg.hash(), lambda, s(0), s(1), engine};
  if (cache) {
    if (auto hit = cache->lookup(key)) return *hit;
    if (cache->offline()) throw Error(ErrorKind::Config, "sample missing from offline cache");
  }
  const OscSample out = integrate(PerturbedPhase(phase, s), amplitude, lambda, engine, cfg);
  if (cache) cache->insert(key, out);
  return out;
}

RandolEntry randol_value(const Sampler& sampler, double gamma, const Eigen::Vector2d& s, const LambdaGrid& grid) {
  return randol_value(sampler, gamma, s, grid.values());
}

RandolEntry randol_value(const Sampler& sampler, double gamma, const Eigen::Vector2d& s,
                         const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw Error(ErrorKind::Config, "lambda grid is empty");
  RandolEntry e;
  for (double lambda : lambdas) {
    try {
      const OscSample o = sampler.sample(lambda, s);
      const double v = std::pow(lambda, gamma) * std::abs(o.value);
      if (e.argmax_lambda == 0.0 || v > e.value) {
        e.value = v;
        e.argmax_lambda = lambda;
      }
      e.max_err = std::max(e.max_err, std::pow(lambda, gamma) * o.err_est);
    } catch (const AccuracyNotReachedError&) {
      e.flagged = true;
    }
  }
  return e;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::InsufficientData, "need at least two points");
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    A(i, 0) = x[i];
    A(i, 1) = 1.0;
    b(i) = y[i];
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
  LineFit f;
  f.slope = c(0);
  f.intercept = c(1);
  f.residual = std::sqrt((A * c - b).squaredNorm() / n);
  f.points = n;
  return f;
}

LineFit decay_fit(const Sampler& sampler, const Eigen::Vector2d& s, const LambdaGrid& grid) {
  std::vector<double> x, y;
  for (double lambda : grid.values()) {
    try {
      const double v = std::abs(sampler.sample(lambda, s).value);
      if (v > 0.0) {
        x.push_back(std::log(lambda));
        y.push_back(std::log(v));
      }
    } catch (const AccuracyNotReachedError&) {
    }
  }
  if (x.size() < 6) throw Error(ErrorKind::InsufficientData, "decay fit needs at least 6 accepted samples");
  return fit_line(x, y);
}

FieldSamples sample_field(const Sampler& sampler, const SGrid& grid, const LambdaGrid& lambdas, int threads) {
  FieldSamples out;
  out.grid = grid;
  out.lambdas = lambdas;
  out.cells = grid.cells();
  const std::vector<double> lv = lambdas.values();
  const int count = static_cast<int>(out.cells.size());
  out.abs_values.assign(count, std::vector<double>(lv.size(), 0.0));
  out.errors.assign(count, std::vector<double>(lv.size(), 0.0));
  out.flagged.assign(count, false);
  std::vector<char> flagged(count, 0);
  parallel_for(count, threads, [&](int i) {
    for (std::size_t l = 0; l < lv.size(); ++l) {
      try {
        const OscSample o = sampler.sample(lv[l], out.cells[i].center);
        out.abs_values[i][l] = std::abs(o.value);
        out.errors[i][l] = o.err_est;
      } catch (const AccuracyNotReachedError& e) {
        out.abs_values[i][l] = std::numeric_limits<double>::quiet_NaN();
        out.errors[i][l] = e.partial.err_est;
        flagged[i] = 1;
      }
    }
  });
  for (int i = 0; i < count; ++i) out.flagged[i] = flagged[i] != 0;
  return out;
}

MaximalField maximal_field(const FieldSamples& samples, double gamma) {
  MaximalField f;
  f.gamma = gamma;
  f.grid = samples.grid;
  f.cells = samples.cells;
  f.flagged_per_annulus.assign(samples.grid.j_max - samples.grid.j_min + 1, 0);
  const std::vector<double> lv = samples.lambdas.values();
  for (std::size_t i = 0; i < samples.cells.size(); ++i) {
    RandolEntry e;
    e.flagged = samples.flagged[i];
    for (std::size_t l = 0; l < lv.size(); ++l) {
      const double a = samples.abs_values[i][l];
      if (std::isnan(a)) continue;
      const double w = std::pow(lv[l], gamma);
      if (e.argmax_lambda == 0.0 || w * a > e.value) {
        e.value = w * a;
        e.argmax_lambda = lv[l];
      }
      e.max_err = std::max(e.max_err, w * samples.errors[i][l]);
    }
    if (e.flagged) ++f.flagged_per_annulus[samples.cells[i].j - samples.grid.j_min];
    f.entries.push_back(e);
  }
  for (std::size_t k = 0; k < f.flagged_per_annulus.size(); ++k)
    if (f.flagged_per_annulus[k] > 0.2 * samples.grid.cells_per_annulus)
      throw Error(ErrorKind::AnnulusUnreliable,
                  "annulus j=" + std::to_string(samples.grid.j_min + static_cast<int>(k)) + " has " +
                      std::to_string(f.flagged_per_annulus[k]) + " flagged cells");
  return f;
}

MaximalField maximal_field(const Sampler& sampler, double gamma, const SGrid& grid, const LambdaGrid& lambdas,
                           int threads) {
  return maximal_field(sample_field(sampler, grid, lambdas, threads), gamma);
}

LineFit annulus_growth(const MaximalField& field, int j_lo, int j_hi) {
  std::vector<double> x, y;
  for (int j = std::max(j_lo, field.grid.j_min); j <= std::min(j_hi, field.grid.j_max); ++j) {
    double best = 0.0;
    for (std::size_t i = 0; i < field.cells.size(); ++i)
      if (field.cells[i].j == j && !field.entries[i].flagged) best = std::max(best, field.entries[i].value);
    if (best > 0.0) {
      x.push_back(j);
      y.push_back(std::log2(best));
    }
  }
  if (x.size() < 3) throw Error(ErrorKind::InsufficientData, "annulus growth needs at least 3 annuli");
  return fit_line(x, y);
}

Rational la_exponent(const Rational& g, int n) { return Rational(3 * n - 1) / Rational(2 * g * n - n - 1); }

Rational exceptional_upper_exponent(const Rational& g) { return Rational(3) / Rational(4 * g - 3); }

Rational nla_lower_exponent(const Rational& g, int n, int m) {
  return Rational(2 * (2 * n - m - 1)) / Rational(2 * n * g - n - 1);
}

Rational nla_upper_exponent(const Rational& g, int m) {
  return Rational(3 * m + 1) / Rational((2 * m + 1) * g - m - 1);
}

Rational d_inf_exponent(const Rational& g) { return Rational(4) / Rational(2 * g - 1); }

namespace {

Rational nla_breakpoint(int m) { return Rational(m + 3, 2 * (m + 1)); }
Rational exceptional_breakpoint(int n) { return Rational(3 * n - 3, 3 * n - 2); }

void need(std::optional<int> v, const char* what) {
  if (!v) throw Error(ErrorKind::InvalidInvariants, std::string("regime needs a finite ") + what);
}

}  // namespace

bool gamma_in_range(Regime regime, const Rational& g, std::optional<int> n, std::optional<int> m) {
  if (regime == Regime::D_INF) {
    need(m, "m");
    return g > Rational(1, 2) && g <= nla_breakpoint(*m);
  }
  need(n, "n");
  return g > Rational(*n + 1, 2 * *n) && g <= 1;
}

Rational predicted_critical_p(Regime regime, const Rational& g, std::optional<int> n, std::optional<int> m) {
  if (!gamma_in_range(regime, g, n, m))
    throw Error(ErrorKind::GammaOutOfRange, "gamma " + format_rational(g) + " outside the admissible range");
  switch (regime) {
    case Regime::LA: return la_exponent(g, *n);
    case Regime::EXCEPTIONAL: return g <= exceptional_breakpoint(*n) ? la_exponent(g, *n) : exceptional_upper_exponent(g);
    case Regime::NLA:
      need(m, "m");
      return g <= nla_breakpoint(*m) ? nla_lower_exponent(g, *n, *m) : nla_upper_exponent(g, *m);
    case Regime::D_INF: return d_inf_exponent(g);
  }
  throw Error(ErrorKind::InvalidInvariants, "unknown regime");
}

bool breakpoint_consistency(int n, int m) {
  const Rational gb = nla_breakpoint(m);
  const bool nla = nla_lower_exponent(gb, n, m) == Rational(2 * (m + 1)) && nla_upper_exponent(gb, m) == Rational(2 * (m + 1));
  bool exc = true;
  if (n > 2) {
    const Rational ge = exceptional_breakpoint(n);
    const Rational target(3 * n - 2, n - 2);
    exc = la_exponent(ge, n) == target && exceptional_upper_exponent(ge) == target;
  }
  return nla && exc;
}

int annulus_exponent(Regime regime, const Rational& g, std::optional<int> n, std::optional<int> m) {
  if (regime == Regime::D_INF || (regime == Regime::NLA && m && g > nla_breakpoint(*m))) {
    need(m, "m");
    return 2 * *m + 1;
  }
  need(n, "n");
  return *n;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::CONSISTENT: return "CONSISTENT";
    case Verdict::INCONSISTENT: return "INCONSISTENT";
    case Verdict::INCONCLUSIVE: return "INCONCLUSIVE";
  }
  return "unknown";
}

ExponentReport lp_probe(const MaximalField& field, const std::vector<double>& q_grid, Regime regime,
                        std::optional<Rational> p_star, const LpProbeOptions& opt) {
  ExponentReport rep;
  rep.regime = regime;
  rep.gamma = field.gamma;
  rep.p_star_predicted = p_star;
  rep.j_lo = std::max(opt.j_lo.value_or(field.grid.j_min), field.grid.j_min);
  rep.j_hi = std::min(opt.j_hi.value_or(field.grid.j_max), field.grid.j_max);
  if (rep.j_hi - rep.j_lo + 1 < 6) throw Error(ErrorKind::InsufficientData, "lp probe needs at least 6 annuli");
  if (q_grid.size() < 2) throw Error(ErrorKind::Config, "q grid needs at least two values");

  // per annulus: log2 of M and of the cell area for unflagged cells, plus the area rescaling
  struct Annulus {
    std::vector<double> log_m, log_area;
    double log_scale = 0.0;
    bool zero = false;
  };
  std::vector<Annulus> ann;
  for (int j = rep.j_lo; j <= rep.j_hi; ++j) {
    Annulus a;
    double total = 0.0, kept = 0.0;
    for (std::size_t i = 0; i < field.cells.size(); ++i) {
      if (field.cells[i].j != j) continue;
      total += field.cells[i].area;
      if (field.entries[i].flagged) continue;
      kept += field.cells[i].area;
      if (field.entries[i].value > 0.0) {
        a.log_m.push_back(std::log2(field.entries[i].value));
        a.log_area.push_back(std::log2(field.cells[i].area));
      }
    }
    a.zero = a.log_m.empty();
    a.log_scale = kept > 0.0 ? std::log2(total / kept) : 0.0;
    ann.push_back(a);
  }
  for (const auto& a : ann)
    if (a.zero) {
      rep.verdict = Verdict::INCONCLUSIVE;
      rep.note = "no blow-up detected (vanishing field)";
      return rep;
    }

  auto log_sums = [&](double q) {
    std::vector<double> out;
    for (const auto& a : ann) {
      std::vector<double> terms(a.log_m.size());
      for (std::size_t k = 0; k < terms.size(); ++k) terms[k] = q * a.log_m[k] + a.log_area[k];
      out.push_back(log_sum_exp2(terms) + a.log_scale);
    }
    return out;
  };
  std::vector<double> js;
  for (int j = rep.j_lo; j <= rep.j_hi; ++j) js.push_back(j);
  auto slope = [&](double q) { return fit_line(js, log_sums(q)); };

  std::vector<double> a_vals;
  for (double q : q_grid) {
    const std::vector<double> ls = log_sums(q);
    for (std::size_t k = 0; k < js.size(); ++k) rep.per_annulus_sums.push_back({q, static_cast<int>(js[k]), std::exp2(ls[k])});
    a_vals.push_back(fit_line(js, ls).slope);
  }
  std::optional<std::size_t> bracket;
  for (std::size_t k = 0; k + 1 < q_grid.size(); ++k)
    if (a_vals[k] < 0.0 && a_vals[k + 1] >= 0.0) {
      bracket = k;
      break;
    }
  if (!bracket) {
    rep.verdict = Verdict::INCONCLUSIVE;
    const bool all_negative = std::all_of(a_vals.begin(), a_vals.end(), [](double v) { return v < 0.0; });
    rep.note = all_negative ? "no blow-up detected on the q grid" : "annulus sums grow at every q on the grid";
    rep.fit_residual = slope(q_grid.back()).residual;
    return rep;
  }
  double lo = q_grid[*bracket], hi = q_grid[*bracket + 1];
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid).slope < 0.0 ? lo : hi) = mid;
  }
  rep.p_hat_empirical = 0.5 * (lo + hi);
  rep.fit_residual = slope(*rep.p_hat_empirical).residual;
  if (!p_star) {
    rep.verdict = Verdict::INCONCLUSIVE;
    rep.note = "no prediction available";
  } else {
    rep.verdict = std::abs(*rep.p_hat_empirical - to_double(*p_star)) <= opt.tolerance ? Verdict::CONSISTENT
                                                                                         : Verdict::INCONSISTENT;
  }
  return rep;
}

std::vector<double> parse_q_grid(const std::string& text) {
  double a = 0, b = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof())
    throw Error(ErrorKind::Config, "q grid must look like A:B:STEP, got '" + text + "'");
  if (!(step > 0.0) || b < a || !(a > 0.0)) throw Error(ErrorKind::Config, "q grid needs 0 < A <= B and STEP > 0");
  std::vector<double> out;
  const int count = static_cast<int>(std::floor((b - a) / step + 1e-9)) + 1;
  for (int k = 0; k < count; ++k) out.push_back(a + k * step);
  return out;
}

ExceptionalReport exceptional_blowup_scan(const ExceptionalScanConfig& cfg, SampleCache* cache) {
  if (cfg.delta_levels < 3) throw Error(ErrorKind::Config, "need at least 3 offsets");
  if (cfg.s2_values.size() < 3) throw Error(ErrorKind::Config, "need at least 3 s2 values");
  if (cfg.lambda_substeps < 1) throw Error(ErrorKind::Config, "lambda_substeps must be positive");
  cfg.lambdas.validate();
  ExceptionalReport rep;
  rep.witness = find_a3_witness(cfg.m);
  rep.gamma = cfg.gamma;
  const int m = cfg.m;
  const double g = cfg.gamma;
  rep.across_predicted = 4.0 * g / 3.0 - 1.0;
  rep.along_predicted = (2.0 * m + 1.0) * g / (m + 1.0) - 1.0;
  const double sigma0 = rep.witness.sigma0(0);
  const Eigen::Vector2d y = rep.witness.point;

  Sampler base;
  base.phase = DPhase::exceptional_example(m);
  base.engine = Engine::DIRECT2D;
  base.cfg = cfg.cfg;
  base.cache = cache;

  // across the curve, in rescaled coordinates (s2 = 1)
  Sampler local = base;
  local.amplitude = Amplitude::product(cfg.window).centered_at(y(0), y(1));
  std::vector<double> lx, ly, px, py, mx, my, ax_all, ay_all;
  for (int k = 0; k < cfg.delta_levels; ++k) {
    const double delta = std::ldexp(cfg.delta_max, -k);
    std::vector<double> lv;
    const double cap = cfg.lambda_cap > 0.0 ? cfg.lambda_cap * std::pow(delta, -4.0 / 3.0) : HUGE_VAL;
    for (int i = 0; i <= (cfg.lambdas.levels - 1) * cfg.lambda_substeps; ++i) {
      const double lambda = cfg.lambdas.lambda0 * std::exp2(static_cast<double>(i) / cfg.lambda_substeps);
      if (lambda <= cap || lv.empty()) lv.push_back(lambda);
    }
    for (int side : {1, -1}) {
      const Eigen::Vector2d s(sigma0 + side * delta, 1.0);
      const RandolEntry e = randol_value(local, g, s, lv);
      rep.rows.push_back({side > 0 ? "across+" : "across-", s(0), s(1), side * delta, e});
      if (e.flagged || !(e.value > 0.0)) continue;
      ax_all.push_back(std::log(delta));
      ay_all.push_back(std::log(e.value));
      if (cfg.fit_delta_max > 0.0 && delta > cfg.fit_delta_max) continue;
      lx.push_back(std::log(delta));
      ly.push_back(std::log(e.value));
      (side > 0 ? px : mx).push_back(std::log(delta));
      (side > 0 ? py : my).push_back(std::log(e.value));
    }
  }
  if (lx.size() < 4) throw Error(ErrorKind::InsufficientData, "too few offsets inside the fit window");
  const LineFit across = fit_line(lx, ly);
  rep.across_exponent = -across.slope;
  rep.across_exponent_all = -fit_line(ax_all, ay_all).slope;
  rep.across_residual = across.residual;
  if (px.size() >= 2) rep.across_exponent_plus = -fit_line(px, py).slope;
  if (mx.size() >= 2) rep.across_exponent_minus = -fit_line(mx, my).slope;

  // along the curve, in the original coordinates with the window carried by the dilation
  std::vector<double> ax, ay;
  for (double s2 : cfg.s2_values) {
    if (!(s2 > 0.0)) throw Error(ErrorKind::Config, "s2 values must be positive");
    const double u1 = std::pow(s2, 1.0 / (m + 1)), u2 = std::pow(s2, m / (m + 1.0));
    Sampler orig = base;
    orig.amplitude = Amplitude::product(cfg.window * u1, cfg.window * u2).centered_at(u1 * y(0), u2 * y(1));
    LambdaGrid lg = cfg.lambdas;
    lg.lambda0 *= std::pow(s2, -(2.0 * m + 1) / (m + 1));
    const Eigen::Vector2d s((sigma0 + cfg.along_delta) * std::pow(s2, 2.0 * m / (m + 1)), s2);
    const RandolEntry e = randol_value(orig, g, s, lg);
    rep.rows.push_back({"along", s(0), s(1), cfg.along_delta, e});
    if (e.flagged || !(e.value > 0.0)) continue;
    ax.push_back(std::log(s2));
    ay.push_back(std::log(e.value));
  }
  const LineFit along = fit_line(ax, ay);
  rep.along_exponent = -along.slope;
  rep.along_residual = along.residual;
  return rep;
}

}  // namespace dosc
