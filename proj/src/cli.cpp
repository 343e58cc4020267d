#include "alphamod/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <random>

#include "alphamod/bump.hpp"
#include "alphamod/construct.hpp"
#include "alphamod/decomp.hpp"
#include "alphamod/errors.hpp"
#include "alphamod/estimates.hpp"
#include "alphamod/evolve.hpp"
#include "alphamod/io.hpp"
#include "alphamod/norms.hpp"

namespace alphamod {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outputs {
  fs::path dir;
  std::string prefix;
  bool gnuplot = false;
  std::vector<fs::path> files;

  fs::path csv(const std::string& table, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
    const fs::path p = dir / (prefix + "_" + table + ".csv");
    write_csv(p, columns, rows);
    files.push_back(p);
    return p;
  }
  void table(const std::string& name, const ExperimentReport& r, const std::string& x,
             std::vector<std::string> y, bool logscale = true) {
    const fs::path p = csv(name, r.columns, r.rows);
    plot(p, r.columns, x, std::move(y), logscale);
  }
  void plot(const fs::path& csv_path, const std::vector<std::string>& columns, const std::string& x,
            std::vector<std::string> y, bool logscale) {
    if (!gnuplot) return;
    fs::path gp = csv_path;
    gp.replace_extension(".gp");
    write_gnuplot(gp, PlotSpec{csv_path.filename().string(), x, std::move(y), logscale}, columns);
    files.push_back(gp);
  }
};

struct Verdict {
  json metrics = json::object();
  json targets = json::object();
  json tolerances = json::object();
  bool pass = false;
};

GridSpec grid_of(const RunConfig& c) {
  try {
    return make_grid(c.grid.d, c.grid.n, c.grid.L);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

Vec3 vec3(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

Verdict run_decompose(const RunConfig& c, Outputs& out) {
  const GridSpec g = grid_of(c);
  Verdict v;
  const DecompositionSymbols dy = dyadic_symbols(g);
  const double dyadic_residual = partition_residual(dy);
  std::vector<std::vector<double>> rows;
  for (std::size_t p = 0; p < dy.count(); ++p) {
    rows.push_back({double(dy.dyadic_j[p]), double(dy.multipliers[p].index.size())});
  }
  out.csv("dyadic", {"j", "support"}, rows);
  rows.clear();
  double worst = 0.0;
  for (double alpha : c.decompose.alphas) {
    const double C = c.space.C > 0.0 ? c.space.C : calibrate_c(g, alpha);
    const DecompositionSymbols sym = alpha_symbols(g, alpha, C);
    const double residual = partition_residual(sym);
    worst = std::max(worst, residual);
    rows.push_back({alpha, C, double(sym.count()), sym.coverage_floor, residual});
  }
  out.csv("alpha", {"alpha", "C", "pieces", "coverage_floor", "residual"}, rows);
  v.metrics = {{"dyadic_residual", dyadic_residual}, {"alpha_residual", worst}, {"dyadic_pieces", dy.count()}};
  v.targets = {{"dyadic_residual", 0.0}, {"alpha_residual", 0.0}};
  v.tolerances = {{"dyadic_residual", c.decompose.dyadic_tolerance}, {"alpha_residual", c.decompose.alpha_tolerance}};
  v.pass = dyadic_residual <= c.decompose.dyadic_tolerance && worst <= c.decompose.alpha_tolerance;
  return v;
}

Verdict run_norm(const RunConfig& c, Outputs& out) {
  const GridSpec g = grid_of(c);
  const Field f = build_field(c, g);
  const NormReport r = norm_report(f, NormParams{c.space.s, c.space.alpha, c.space.q, c.space.p, c.space.C});
  const std::vector<std::string> columns{"l2", "lp", "linf", "modulation_sharp", "modulation_smooth", "besov",
                                         "sobolev", "sobolev_homogeneous", "C_used", "max_bracket", "max_j"};
  const std::vector<double> row{r.l2, r.lp, r.linf, r.modulation_sharp, r.modulation_smooth, r.besov,
                                r.sobolev, r.sobolev_homogeneous, r.C_used, r.max_bracket, double(r.max_j)};
  out.csv("norms", columns, {row});
  std::vector<std::vector<double>> sums;
  for (std::size_t i = 0; i < r.modulation_partial_sums.size(); ++i) {
    sums.push_back({double(i), r.modulation_partial_sums[i]});
  }
  out.csv("partial_sums", {"piece", "partial_sum"}, sums);
  Verdict v;
  v.pass = true;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    v.metrics[columns[i]] = row[i];
    if (columns[i] != "sobolev_homogeneous" && !std::isfinite(row[i])) v.pass = false;
  }
  return v;
}

EvolutionConfig evolution_of(const RunConfig& c) {
  EvolutionConfig e;
  e.lambda = c.physics.lambda;
  e.kappa = c.physics.kappa;
  e.dt = c.evolve.dt;
  e.t_end = c.evolve.t_end;
  e.dealias = c.evolve.dealias;
  e.snapshot_stride = c.evolve.snapshot_stride;
  e.max_phase_per_step = c.evolve.max_phase_per_step;
  return e;
}

std::vector<std::vector<double>> diagnostic_rows(const Trajectory& t) {
  std::vector<std::vector<double>> rows;
  for (const auto& d : t.diagnostics) rows.push_back({d.t, d.mass, d.energy, d.grad_norm, d.virial[0]});
  return rows;
}

const std::vector<std::string> kDiagnosticColumns{"t", "mass", "energy", "grad_norm", "virial"};

Verdict run_evolve(const RunConfig& c, Outputs& out) {
  const GridSpec g = grid_of(c);
  const Field u0 = build_field(c, g);
  Verdict v;
  Trajectory traj;
  try {
    traj = evolve(u0, evolution_of(c));
  } catch (const BlowupDetected& e) {
    traj = e.partial();
    v.metrics["blowup_time"] = e.last_time();
  }
  const fs::path p = out.csv("diagnostics", kDiagnosticColumns, diagnostic_rows(traj));
  out.plot(p, kDiagnosticColumns, "t", {"mass", "energy", "grad_norm"}, false);
  if (c.evolve.export_snapshots) {
    std::vector<std::vector<double>> rows;
    for (const auto& s : traj.snapshots) {
      for (std::size_t i = 0; i < s.field.values.size(); ++i) {
        rows.push_back({s.t, double(i), s.field.values[i].real(), s.field.values[i].imag()});
      }
    }
    out.csv("snapshots", {"t", "index", "re", "im"}, rows);
  }
  const double m0 = traj.diagnostics.front().mass, e0 = traj.diagnostics.front().energy;
  double mass_drift = 0.0, energy_drift = 0.0;
  for (const auto& d : traj.diagnostics) {
    mass_drift = std::max(mass_drift, m0 > 0.0 ? std::abs(d.mass - m0) / m0 : std::abs(d.mass));
    energy_drift = std::max(energy_drift, std::abs(d.energy - e0) / std::max(std::abs(e0), 1e-300));
  }
  v.metrics["mass_drift"] = mass_drift;
  v.metrics["energy_drift"] = energy_drift;
  v.metrics["t_final"] = traj.diagnostics.back().t;
  v.targets["mass_drift"] = 0.0;
  v.tolerances["mass_drift"] = c.evolve.mass_tolerance;
  v.pass = !v.metrics.contains("blowup_time") && mass_drift <= c.evolve.mass_tolerance;
  return v;
}

Verdict from_report(const ExperimentReport& r) {
  Verdict v;
  add_fit_metrics(v.metrics, r);
  v.targets["slope"] = r.target;
  v.tolerances["slope"] = r.tolerance;
  v.pass = r.pass;
  return v;
}

Verdict run_strichartz(const RunConfig& c, Outputs& out) {
  StrichartzOptions o;
  o.grid = grid_of(c);
  o.alpha = c.space.alpha;
  o.q = c.strichartz.q;
  o.r = c.strichartz.r;
  o.k = c.strichartz.k;
  o.width_fraction = c.strichartz.width_fraction;
  o.C = c.strichartz.C;
  o.T0 = c.strichartz.T0;
  o.time.rel_tol = c.strichartz.rel_tol;
  o.tolerance = c.strichartz.tolerance;
  const ExperimentReport r = strichartz_sweep(o);
  out.table("sweep", r, "bracket", {"measured", "data_norm"});
  return from_report(r);
}

Conjugation pattern_of(const std::string& s) {
  if (s == "conj_u_v") return Conjugation::conj_u_v;
  if (s == "u_conj_v") return Conjugation::u_conj_v;
  if (s == "conj_u_conj_v") return Conjugation::conj_u_conj_v;
  return Conjugation::uv;
}

Verdict run_bilinear(const RunConfig& c, Outputs& out) {
  BilinearSweepOptions o;
  o.grid = grid_of(c);
  o.first = FourierBump{{0.0, 0.0, 0.0}, c.bilinear.width, 1.0};
  o.second = o.first;
  o.pattern = pattern_of(c.bilinear.pattern);
  o.separations = c.bilinear.separations;
  o.tolerance = c.bilinear.tolerance;
  o.measure.tail_tol = c.bilinear.tail_tol;
  const ExperimentReport r = bilinear_sweep(o);
  out.table("sweep", r, "separation", {"measured", "oracle"});
  return from_report(r);
}

Verdict run_construct(const RunConfig& c, Outputs& out) {
  const GridSpec g = grid_of(c);
  SupercriticalDataSpec spec;
  spec.eps = c.construct.eps;
  spec.alpha = c.space.alpha;
  spec.kappa = c.physics.kappa;
  spec.d = c.grid.d;
  spec.s = c.space.s;
  spec.J = c.construct.J;
  spec.max_pieces = c.construct.max_pieces;
  spec.c = c.construct.c;
  try {
    validate(spec);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("construct: ") + e.what());
  }
  const SupercriticalData data = build_supercritical_u0(spec, g);
  std::vector<std::vector<double>> rows;
  for (const auto& p : data.pieces) {
    rows.push_back({double(p.j), double(p.k), p.bracket, p.center, p.width, p.amplitude});
  }
  out.csv("pieces", {"j", "k", "bracket", "center", "width", "amplitude"}, rows);
  NormClaimOptions o;
  o.sigmas = c.construct.sigmas;
  o.refinements = c.construct.refinements;
  o.C = c.space.C;
  o.slope_tolerance = c.construct.slope_tolerance;
  o.besov_tolerance = c.construct.besov_tolerance;
  const NormClaimReport r = norm_claim_report(data, spec, o);
  Verdict v;
  v.pass = true;
  for (const auto& [name, rep] : {std::pair{"l2_scaling", &r.l2_scaling}, std::pair{"modulation_scaling", &r.modulation_scaling},
                                  std::pair{"besov_growth", &r.besov_growth}, std::pair{"grid_max", &r.grid_max}}) {
    const std::string key = name;
    out.table(key, *rep, rep->columns.front(), {rep->columns[1]});
    add_fit_metrics(v.metrics, *rep, key + ".");
    v.metrics[key + ".pass"] = rep->pass;
    v.targets[key + ".slope"] = rep->target;
    v.tolerances[key + ".slope"] = rep->tolerance;
    v.pass = v.pass && rep->pass;
  }
  v.metrics["pieces"] = data.pieces.size();
  v.metrics["skipped_small"] = data.skipped_small;
  v.metrics["empty_windows"] = data.empty_windows;
  return v;
}

Verdict run_inflate(const RunConfig& c, Outputs& out) {
  InflationOptions o;
  o.s = c.space.s;
  o.alpha = c.space.alpha;
  o.kappa = c.physics.kappa;
  o.d = c.grid.d;
  o.N = c.inflate.N;
  o.points_per_width = c.inflate.points_per_width;
  o.method = c.inflate.method == "quadrature" ? TaylorMethod::quadrature : TaylorMethod::resonant;
  o.C = c.space.C;
  o.tolerance = c.inflate.tolerance;
  const ExperimentReport r = inflation_sweep(o);
  out.table("sweep", r, "bracket", {"taylor_norm", "data_norm"});
  return from_report(r);
}

Verdict run_picard(const RunConfig& c, Outputs& out) {
  const GridSpec g = grid_of(c);
  const Field u0 = build_field(c, g);
  EvolutionConfig e = evolution_of(c);
  PicardOptions o;
  o.s = c.space.s;
  o.alpha = c.space.alpha;
  o.C = c.space.C;
  o.max_iter = c.picard.max_iter;
  o.tol = c.picard.tol;
  Verdict v;
  std::vector<double> ratios, differences;
  try {
    const PicardResult r = picard_solve(u0, e, o);
    ratios = r.ratios;
    differences = r.differences;
    v.metrics["iterations"] = r.iterations;
    v.metrics["data_norm"] = r.data_norm;
    v.metrics["small_data"] = r.small_data;
    v.metrics["converged"] = r.converged;
    v.pass = r.converged && r.iterations <= c.picard.max_iterations;
  } catch (const ContractionFailure& f) {
    ratios = f.ratios();
    v.metrics["converged"] = false;
    v.metrics["contraction_failure"] = f.what();
  }
  double worst = 0.0;
  for (double r : ratios) worst = std::max(worst, r);
  v.pass = v.pass && worst < c.picard.max_ratio;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < std::max(ratios.size(), differences.size()); ++i) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rows.push_back({double(i + 1), i < differences.size() ? differences[i] : nan, i < ratios.size() ? ratios[i] : nan});
  }
  out.csv("iterations", {"iteration", "difference", "ratio"}, rows);
  v.metrics["max_ratio"] = worst;
  v.targets["max_ratio"] = 0.0;
  v.tolerances["max_ratio"] = c.picard.max_ratio;
  v.tolerances["max_iterations"] = c.picard.max_iterations;
  return v;
}

Verdict run_glassey(const RunConfig& c, Outputs& out) {
  if (c.grid.d != 1) throw ConfigError("glassey: only d = 1 is supported");
  const GridSpec g = grid_of(c);
  const double A = c.glassey.amplitude > 0.0 ? c.glassey.amplitude
                                             : glassey_amplitude(c.physics.lambda, c.physics.kappa, c.glassey.beta);
  const Field u0 = chirped_gaussian(g, A, c.glassey.beta);
  EvolutionConfig e = evolution_of(c);
  const GlasseyResult foc = glassey_run(u0, e);
  e.lambda = -e.lambda;
  e.t_end = c.glassey.twin_t_end;
  const GlasseyResult twin = glassey_run(u0, e);
  out.plot(out.csv("focusing", kDiagnosticColumns, diagnostic_rows(foc.trajectory)), kDiagnosticColumns, "t",
           {"grad_norm"}, false);
  out.csv("twin", kDiagnosticColumns, diagnostic_rows(twin.trajectory));
  Verdict v;
  v.metrics = {{"amplitude", A},
               {"initial_energy", foc.initial_energy},
               {"initial_virial", foc.initial_virial},
               {"growth", foc.growth},
               {"stopped", foc.stopped},
               {"stop_reason", foc.stop_reason},
               {"stop_time", foc.stop_time},
               {"monotone", foc.monotone},
               {"twin_growth", twin.growth},
               {"twin_stopped", twin.stopped}};
  v.targets = {{"growth", c.glassey.growth_target}, {"twin_growth", 1.0}};
  v.tolerances = {{"twin_growth", c.glassey.twin_bound}};
  v.pass = foc.growth >= c.glassey.growth_target && !twin.stopped && twin.growth <= c.glassey.twin_bound;
  return v;
}

}  // namespace

Field build_field(const RunConfig& c, const GridSpec& g) {
  const FieldBlock& f = c.field;
  Field out;
  if (f.type == "zero") {
    out = zero_field(g);
  } else if (f.type == "gaussian") {
    out = sample(g, Gaussian{vec3(f.center), f.width, vec3(f.modulation), f.amplitude});
  } else if (f.type == "bump") {
    out = sample(g, FourierBump{vec3(f.center), f.width, f.amplitude});
  } else if (f.type == "plane") {
    out = sample(g, PlaneWave{vec3(f.modulation), f.amplitude});
  } else if (f.type == "random") {
    // Gaussian spectral coefficients under a smooth cut-off of radius width.
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> nd;
    SpectralField s = zero_spectrum(g);
    for (std::size_t i = 0; i < s.coefficients.size(); ++i) {
      const Vec3 xi = frequency(g, i);
      double r2 = 0.0;
      for (int a = 0; a < g.d; ++a) r2 += (xi[a] - f.center[a]) * (xi[a] - f.center[a]);
      const double re = nd(rng), im = nd(rng);
      s.coefficients[i] = f.amplitude * bump_radial(std::sqrt(r2) / f.width) * cplx(re, im);
    }
    out = to_physical(s);
  } else {
    throw ConfigError("field: unknown type " + f.type);
  }
  if (f.norm > 0.0) {
    const double m = modulation_norm(out, c.space.s, c.space.alpha, ModulationVariant::smooth, c.space.C);
    if (m == 0.0) throw ConfigError("field: cannot rescale a zero field to a positive norm");
    for (auto& z : out.values) z *= f.norm / m;
  }
  return out;
}

RunOutcome run(const RunConfig& cfg, const RunOptions& opts) {
  if (opts.jobs > 0) omp_set_num_threads(opts.jobs);
  Outputs out;
  out.dir = opts.out_dir.empty() ? fs::path(cfg.output.dir) : opts.out_dir;
  out.prefix = cfg.output.prefix.empty() ? cfg.command : cfg.output.prefix;
  out.gnuplot = opts.emit_gnuplot;

  RunConfig resolved = cfg;
  resolved.output.dir = out.dir.string();
  resolved.output.prefix = out.prefix;

  Verdict v;
  try {
    const std::string& cmd = cfg.command;
    if (cmd == "decompose") v = run_decompose(cfg, out);
    else if (cmd == "norm") v = run_norm(cfg, out);
    else if (cmd == "evolve") v = run_evolve(cfg, out);
    else if (cmd == "strichartz") v = run_strichartz(cfg, out);
    else if (cmd == "bilinear") v = run_bilinear(cfg, out);
    else if (cmd == "construct") v = run_construct(cfg, out);
    else if (cmd == "inflate") v = run_inflate(cfg, out);
    else if (cmd == "picard") v = run_picard(cfg, out);
    else if (cmd == "glassey") v = run_glassey(cfg, out);
    else throw ConfigError("unknown command " + cmd);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    v = Verdict{};
    v.metrics["error"] = e.what();
  }
  RunOutcome result;
  result.summary = make_summary(cfg.command, to_json(resolved), v.metrics, v.targets, v.tolerances, v.pass);
  const fs::path summary = out.dir / (out.prefix + "_summary.json");
  write_json(summary, result.summary);
  out.files.push_back(summary);
  result.files = std::move(out.files);
  result.exit_code = v.pass ? kExitPass : kExitFail;
  return result;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"alpha-modulation NLS experiments"};
  std::string command, config_path, out_dir;
  int jobs = 0;
  bool gnuplot = false;
  app.add_option("command", command, "decompose, norm, evolve, strichartz, bilinear, construct, inflate, picard or glassey")
      ->required();
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--jobs", jobs, "OpenMP threads for the sweeps")->check(CLI::NonNegativeNumber);
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_flag("--emit-gnuplot", gnuplot, "write a gnuplot script next to each plotted table");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }
  try {
    RunConfig cfg = load_config(config_path);
    if (cfg.command != command) {
      throw ConfigError("command '" + command + "' does not match the configuration's '" + cfg.command + "'");
    }
    const RunOutcome r = run(cfg, RunOptions{out_dir, jobs, gnuplot});
    for (const auto& f : r.files) std::cout << f.string() << '\n';
    std::cout << (r.exit_code == kExitPass ? "PASS" : "FAIL") << '\n';
    if (r.exit_code != kExitPass) std::cerr << r.summary["metrics"].dump(2) << '\n';
    return r.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace alphamod
