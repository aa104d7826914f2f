#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dosc/cache.hpp"
#include "dosc/io.hpp"
#include "dosc/randol.hpp"

using namespace dosc;

namespace {

struct Options {
  std::string phase;
  std::string gamma = "1";
  std::string q_grid = "1:8:0.125";
  std::string engine = "reduced";
  std::string cache;
  std::string out;
  double lambda = 1.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double lambda0 = -1.0;  // negative: command default
  int levels = -1;
  int jmin = 2;
  int jmax = 8;
  int cells = 16;
  int fit_jmin = -1;
  int fit_jmax = -1;
  double tol = 0.0;  // 0: library defaults
  int max_depth = 40;
  double p_tol = 0.35;
  int threads = 0;
  int m = 2;
  int delta_levels = 9;
  double delta_max = 0.125;

  Json to_json() const {
    return {{"phase", phase},   {"gamma", gamma},     {"q_grid", q_grid},     {"engine", engine},
            {"cache", cache},   {"out", out},         {"lambda", lambda},     {"s1", s1},
            {"s2", s2},         {"lambda0", lambda0}, {"levels", levels},     {"jmin", jmin},
            {"jmax", jmax},     {"cells", cells},     {"fit_jmin", fit_jmin}, {"fit_jmax", fit_jmax},
            {"tol", tol},       {"max_depth", max_depth}, {"p_tol", p_tol},     {"threads", threads},   {"m", m},
            {"delta_levels", delta_levels}, {"delta_max", delta_max}};
  }

  static Options from_json(const Json& j) {
    Options o;
    try {
      j.at("phase").get_to(o.phase);
      j.at("gamma").get_to(o.gamma);
      j.at("q_grid").get_to(o.q_grid);
      j.at("engine").get_to(o.engine);
      j.at("cache").get_to(o.cache);
      j.at("out").get_to(o.out);
      j.at("lambda").get_to(o.lambda);
      j.at("s1").get_to(o.s1);
      j.at("s2").get_to(o.s2);
      j.at("lambda0").get_to(o.lambda0);
      j.at("levels").get_to(o.levels);
      j.at("jmin").get_to(o.jmin);
      j.at("jmax").get_to(o.jmax);
      j.at("cells").get_to(o.cells);
      j.at("fit_jmin").get_to(o.fit_jmin);
      j.at("fit_jmax").get_to(o.fit_jmax);
      j.at("tol").get_to(o.tol);
      j.at("max_depth").get_to(o.max_depth);
      j.at("p_tol").get_to(o.p_tol);
      j.at("threads").get_to(o.threads);
      j.at("m").get_to(o.m);
      j.at("delta_levels").get_to(o.delta_levels);
      j.at("delta_max").get_to(o.delta_max);
    } catch (const Json::exception& e) {
      throw Error(ErrorKind::Config, std::string("manifest config: ") + e.what());
    }
    return o;
  }
};

QuadratureConfig quad_config(const Options& o) {
  QuadratureConfig cfg;
  if (o.tol < 0.0) throw Error(ErrorKind::Config, "--tol must be positive");
  if (o.tol > 0.0) {
    cfg.rel_tol = o.tol;
    cfg.abs_tol = o.tol * 1e-2;
  }
  if (o.max_depth < 1) throw Error(ErrorKind::Config, "--max-depth must be positive");
  cfg.max_depth = o.max_depth;
  return cfg;
}

Engine parse_engine(const std::string& s) {
  if (s == "direct") return Engine::DIRECT2D;
  if (s == "reduced") return Engine::REDUCED1D;
  throw Error(ErrorKind::Config, "--engine must be direct or reduced here, got '" + s + "'");
}

LambdaGrid lambda_grid(const Options& o, LambdaGrid def) {
  if (o.lambda0 >= 0.0) def.lambda0 = o.lambda0;
  if (o.levels >= 0) def.levels = o.levels;
  def.validate();
  return def;
}

std::string cache_path(const Options& o) { return o.cache.empty() ? SampleCache::default_path() : o.cache; }

Sampler make_sampler(const PhaseInput& input, const Options& o, SampleCache& cache) {
  Sampler s;
  s.phase = input.phase;
  s.amplitude = input.amplitude;
  s.engine = parse_engine(o.engine);
  s.cfg = quad_config(o);
  s.cache = &cache;
  return s;
}

void need_out(const Options& o) {
  if (o.out.empty()) throw Error(ErrorKind::Config, "--out FILE is required");
}

struct Run {
  std::string command;
  Options opt;
  bool offline = false;
  RunManifest manifest;
  Json result;  // printed on stdout
  int code = 0;
};

void finish_manifest(Run& run, const std::string& csv, const std::string& body,
                     std::chrono::steady_clock::time_point start) {
  run.manifest.tool_version = kToolVersion;
  run.manifest.command = run.command;
  run.manifest.config = run.opt.to_json();
  run.manifest.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  run.manifest.outputs = {std::filesystem::path(csv).filename().string()};
  const std::string mpath = manifest_path_for(csv);
  write_csv(csv, std::filesystem::path(mpath).filename().string(), body);
  write_text(mpath, run.manifest.to_json().dump(2) + "\n");
}

void cmd_decay(Run& run) {
  const Options& o = run.opt;
  need_out(o);
  const auto start = std::chrono::steady_clock::now();
  const PhaseInput input = load_phase_input(o.phase);
  SampleCache cache(cache_path(o));
  cache.set_offline(run.offline);
  const Sampler sampler = make_sampler(input, o, cache);
  const LambdaGrid grid = lambda_grid(o, {2.0, 13});
  const Eigen::Vector2d s(o.s1, o.s2);
  std::vector<double> lv, av, x, y;
  int failed = 0;
  for (double lambda : grid.values()) {
    double a = std::numeric_limits<double>::quiet_NaN();
    try {
      a = std::abs(sampler.sample(lambda, s).value);
    } catch (const AccuracyNotReachedError&) {
      ++failed;
    }
    lv.push_back(lambda);
    av.push_back(a);
    if (a > 0.0) {
      x.push_back(std::log(lambda));
      y.push_back(std::log(a));
    }
  }
  if (x.size() < 6) throw Error(ErrorKind::InsufficientData, "decay fit needs at least 6 accepted samples");
  const LineFit fit = fit_line(x, y);
  std::ostringstream body;
  body << "lambda,abs_I,fit\n";
  for (std::size_t k = 0; k < lv.size(); ++k)
    body << format_double(lv[k]) << "," << (std::isnan(av[k]) ? std::string("nan") : format_double(av[k])) << ","
         << format_double(std::exp(fit.intercept + fit.slope * std::log(lv[k]))) << "\n";
  run.manifest.grids = {{"lambda0", grid.lambda0}, {"levels", grid.levels}};
  run.manifest.flagged_cells = {failed};
  run.result = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"residual", fit.residual}, {"points", fit.points}};
  run.manifest.verdicts = run.result;
  finish_manifest(run, o.out, body.str(), start);
}

struct FieldRun {
  PhaseInput input;
  PhaseInvariants inv;
  Rational gamma;
  SGrid grid;
  LambdaGrid lambdas;
  MaximalField field;
};

FieldRun compute_field(const Options& o, SampleCache& cache) {
  FieldRun f;
  f.input = load_phase_input(o.phase);
  f.inv = phase_invariants(f.input);
  f.gamma = parse_rational_or_decimal(o.gamma);
  if (!gamma_in_range(f.inv.regime, f.gamma, f.inv.n, f.inv.m))
    throw Error(ErrorKind::GammaOutOfRange, "gamma " + o.gamma + " outside the admissible range");
  f.grid.n_rho = annulus_exponent(f.inv.regime, f.gamma, f.inv.n, f.inv.m);
  f.grid.j_min = o.jmin;
  f.grid.j_max = o.jmax;
  f.grid.cells_per_annulus = o.cells;
  f.grid.validate();
  f.lambdas = lambda_grid(o, {2.0, 13});
  const Sampler sampler = make_sampler(f.input, o, cache);
  f.field = maximal_field(sampler, to_double(f.gamma), f.grid, f.lambdas, o.threads);
  return f;
}

Json field_grids(const FieldRun& f) {
  return {{"lambda0", f.lambdas.lambda0}, {"levels", f.lambdas.levels}, {"n_rho", f.grid.n_rho},
          {"jmin", f.grid.j_min},         {"jmax", f.grid.j_max},       {"cells_per_annulus", f.grid.cells_per_annulus}};
}

void cmd_randol(Run& run) {
  const Options& o = run.opt;
  need_out(o);
  const auto start = std::chrono::steady_clock::now();
  SampleCache cache(cache_path(o));
  cache.set_offline(run.offline);
  const FieldRun f = compute_field(o, cache);
  std::ostringstream body;
  body << "s1,s2,rho,M_gamma,argmax_lambda,flag\n";
  for (std::size_t i = 0; i < f.field.cells.size(); ++i) {
    const auto& c = f.field.cells[i];
    const auto& e = f.field.entries[i];
    body << format_double(c.center(0)) << "," << format_double(c.center(1)) << ","
         << format_double(quasi_distance(c.center, f.grid.n_rho)) << "," << format_double(e.value) << ","
         << format_double(e.argmax_lambda) << "," << (e.flagged ? 1 : 0) << "\n";
  }
  run.manifest.grids = field_grids(f);
  run.manifest.flagged_cells = f.field.flagged_per_annulus;
  run.result = {{"regime", to_string(f.inv.regime)}, {"gamma", format_rational(f.gamma)},
                {"cells", f.field.cells.size()}, {"n_rho", f.grid.n_rho}};
  run.manifest.verdicts = run.result;
  finish_manifest(run, o.out, body.str(), start);
}

void cmd_lp_probe(Run& run) {
  const Options& o = run.opt;
  need_out(o);
  const auto start = std::chrono::steady_clock::now();
  const std::vector<double> q = parse_q_grid(o.q_grid);
  SampleCache cache(cache_path(o));
  cache.set_offline(run.offline);
  const FieldRun f = compute_field(o, cache);
  LpProbeOptions lo;
  lo.tolerance = o.p_tol;
  if (o.fit_jmin >= 0) lo.j_lo = o.fit_jmin;
  if (o.fit_jmax >= 0) lo.j_hi = o.fit_jmax;
  const Rational p_star = predicted_critical_p(f.inv.regime, f.gamma, f.inv.n, f.inv.m);
  const ExponentReport rep = lp_probe(f.field, q, f.inv.regime, p_star, lo);
  std::ostringstream body;
  body << "j,q,S_j\n";
  for (const auto& s : rep.per_annulus_sums) body << s.j << "," << format_double(s.q) << "," << format_double(s.sum) << "\n";
  run.manifest.grids = field_grids(f);
  run.manifest.grids["q_grid"] = o.q_grid;
  run.manifest.flagged_cells = f.field.flagged_per_annulus;
  run.result = report_json(rep);
  run.manifest.verdicts = run.result;
  finish_manifest(run, o.out, body.str(), start);
  if (rep.verdict == Verdict::INCONCLUSIVE) run.code = 4;
}

void cmd_exceptional(Run& run) {
  const Options& o = run.opt;
  need_out(o);
  const auto start = std::chrono::steady_clock::now();
  SampleCache cache(cache_path(o));
  cache.set_offline(run.offline);
  ExceptionalScanConfig cfg;
  cfg.m = o.m;
  cfg.gamma = to_double(parse_rational_or_decimal(o.gamma));
  cfg.delta_levels = o.delta_levels;
  cfg.delta_max = o.delta_max;
  cfg.lambdas = lambda_grid(o, cfg.lambdas);
  cfg.cfg = quad_config(o);
  const ExceptionalReport rep = exceptional_blowup_scan(cfg, &cache);
  std::ostringstream body;
  body << "kind,s1,s2,delta,M_gamma,argmax_lambda,flag\n";
  int flagged = 0;
  for (const auto& r : rep.rows) {
    body << r.kind << "," << format_double(r.s1) << "," << format_double(r.s2) << "," << format_double(r.delta) << ","
         << format_double(r.entry.value) << "," << format_double(r.entry.argmax_lambda) << ","
         << (r.entry.flagged ? 1 : 0) << "\n";
    flagged += r.entry.flagged ? 1 : 0;
  }
  run.manifest.grids = {{"lambda0", cfg.lambdas.lambda0},   {"levels", cfg.lambdas.levels},
                        {"lambda_substeps", cfg.lambda_substeps}, {"lambda_cap", cfg.lambda_cap},
                        {"delta_max", cfg.delta_max},       {"delta_levels", cfg.delta_levels},
                        {"fit_delta_max", cfg.fit_delta_max},
                        {"s2_values", cfg.s2_values},       {"window", cfg.window},
                        {"along_delta", cfg.along_delta}};
  run.manifest.flagged_cells = {flagged};
  run.result = {{"witness", witness_json(rep.witness)},
                {"gamma", rep.gamma},
                {"across_exponent", rep.across_exponent},
                {"across_exponent_all", rep.across_exponent_all},
                {"across_exponent_plus", rep.across_exponent_plus},
                {"across_exponent_minus", rep.across_exponent_minus},
                {"across_predicted", rep.across_predicted},
                {"across_residual", rep.across_residual},
                {"along_exponent", rep.along_exponent},
                {"along_predicted", rep.along_predicted},
                {"along_residual", rep.along_residual}};
  run.manifest.verdicts = run.result;
  finish_manifest(run, o.out, body.str(), start);
}

int dispatch(Run& run) {
  if (run.command == "decay") cmd_decay(run);
  else if (run.command == "randol") cmd_randol(run);
  else if (run.command == "lp-probe") cmd_lp_probe(run);
  else if (run.command == "exceptional") cmd_exceptional(run);
  else throw Error(ErrorKind::Config, "cannot replay command '" + run.command + "'");
  std::cout << run.result.dump(2) << "\n";
  return run.code;
}

int cmd_analyze(const Options& o) {
  const PhaseInput input = load_phase_input(o.phase);
  const std::string text = analysis_json(input).dump(2) + "\n";
  if (!o.out.empty()) write_text(o.out, text);
  std::cout << text;
  return 0;
}

int cmd_integrate(const Options& o) {
  const PhaseInput input = load_phase_input(o.phase);
  if (!(o.lambda > 0.0)) throw Error(ErrorKind::Config, "--lambda must be positive");
  SampleCache cache(cache_path(o));
  const Eigen::Vector2d s(o.s1, o.s2);
  auto one = [&](Engine e) {
    Options oo = o;
    oo.engine = e == Engine::DIRECT2D ? "direct" : "reduced";
    return make_sampler(input, oo, cache).sample(o.lambda, s);
  };
  Json out;
  try {
    if (o.engine == "both") {
      const OscSample d = one(Engine::DIRECT2D);
      const OscSample r = one(Engine::REDUCED1D);
      out = {{"direct", sample_json(d)}, {"reduced", sample_json(r)}, {"difference", std::abs(d.value - r.value)}};
    } else {
      out = sample_json(one(parse_engine(o.engine)));
    }
  } catch (const AccuracyNotReachedError& e) {
    Json partial = sample_json(e.partial);
    partial["error"] = e.what();
    std::cout << partial.dump(2) << "\n";
    std::cerr << e.what() << "\n";
    return exit_code(ErrorKind::AccuracyNotReached);
  }
  const std::string text = out.dump(2) + "\n";
  if (!o.out.empty()) write_text(o.out, text);
  std::cout << text;
  return 0;
}

int cmd_report(const std::string& manifest_file, const std::string& out, const std::string& cache) {
  const RunManifest m = RunManifest::from_json(Json::parse(read_text(manifest_file)));
  Run run;
  run.command = m.command;
  run.opt = Options::from_json(m.config);
  if (!out.empty()) run.opt.out = out;
  if (!cache.empty()) run.opt.cache = cache;
  run.offline = true;
  return dispatch(run);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oscillatory integrals with D-type phase singularities"};
  app.require_subcommand(1);
  Options o;
  std::string manifest_file;

  auto phase_opt = [&](CLI::App* c) { c->add_option("--phase", o.phase, "Phase JSON file")->required(); };
  auto quad_opts = [&](CLI::App* c) {
    c->add_option("--tol", o.tol, "Relative tolerance (absolute tolerance is 1e-2 of it)");
    c->add_option("--max-depth", o.max_depth, "Maximal bisection depth");
    c->add_option("--cache", o.cache, "Sample cache file");
  };
  auto grid_opts = [&](CLI::App* c) {
    c->add_option("--lambda0", o.lambda0, "First frequency of the grid");
    c->add_option("--levels", o.levels, "Number of dyadic frequency levels");
  };
  auto field_opts = [&](CLI::App* c) {
    phase_opt(c);
    quad_opts(c);
    grid_opts(c);
    c->add_option("--gamma", o.gamma, "Exponent gamma, exact decimal or p/q");
    c->add_option("--jmin", o.jmin, "First annulus");
    c->add_option("--jmax", o.jmax, "Last annulus");
    c->add_option("--cells-per-annulus", o.cells, "Angular cells per annulus");
    c->add_option("--engine", o.engine, "direct or reduced");
    c->add_option("--threads", o.threads, "Worker threads (0: all cores)");
    c->add_option("--out", o.out, "Output CSV")->required();
  };

  auto* analyze = app.add_subcommand("analyze", "Newton polygon, normal form and regime of a phase");
  phase_opt(analyze);
  analyze->add_option("--out", o.out, "Output JSON");

  auto* integrate = app.add_subcommand("integrate", "One sample I(lambda, s)");
  phase_opt(integrate);
  quad_opts(integrate);
  integrate->add_option("--lambda", o.lambda, "Frequency")->required();
  integrate->add_option("--s1", o.s1, "Linear perturbation s1");
  integrate->add_option("--s2", o.s2, "Linear perturbation s2");
  integrate->add_option("--engine", o.engine, "direct, reduced or both");
  integrate->add_option("--out", o.out, "Output JSON");

  auto* decay = app.add_subcommand("decay", "|I(lambda, s)| over a dyadic grid with a log-log fit");
  phase_opt(decay);
  quad_opts(decay);
  grid_opts(decay);
  decay->add_option("--s1", o.s1, "Linear perturbation s1");
  decay->add_option("--s2", o.s2, "Linear perturbation s2");
  decay->add_option("--engine", o.engine, "direct or reduced");
  decay->add_option("--out", o.out, "Output CSV")->required();

  auto* randol = app.add_subcommand("randol", "Maximal function field over quasi-polar cells");
  field_opts(randol);

  auto* lp = app.add_subcommand("lp-probe", "Annulus sums and the empirical critical exponent");
  field_opts(lp);
  lp->add_option("--q-grid", o.q_grid, "A:B:STEP");
  lp->add_option("--fit-jmin", o.fit_jmin, "First annulus used in the fit");
  lp->add_option("--fit-jmax", o.fit_jmax, "Last annulus used in the fit");
  lp->add_option("--p-tol", o.p_tol, "Tolerance for the CONSISTENT verdict");

  auto* exc = app.add_subcommand("exceptional", "Blow-up scan near the exceptional curve");
  quad_opts(exc);
  grid_opts(exc);
  exc->add_option("--m", o.m, "m of the exceptional example");
  exc->add_option("--gamma", o.gamma, "Exponent gamma");
  exc->add_option("--delta-levels", o.delta_levels, "Number of offsets across the curve");
  exc->add_option("--delta-max", o.delta_max, "Largest offset across the curve");
  exc->add_option("--out", o.out, "Output CSV")->required();

  auto* report = app.add_subcommand("report", "Recompute a run from its manifest using cached samples only");
  report->add_option("--manifest", manifest_file, "Manifest JSON")->required();
  report->add_option("--out", o.out, "Output CSV");
  report->add_option("--cache", o.cache, "Sample cache file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(o);
    if (integrate->parsed()) return cmd_integrate(o);
    if (report->parsed()) return cmd_report(manifest_file, o.out, o.cache);
    Run run;
    run.opt = o;
    run.command = decay->parsed() ? "decay" : randol->parsed() ? "randol" : lp->parsed() ? "lp-probe" : "exceptional";
    return dispatch(run);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
