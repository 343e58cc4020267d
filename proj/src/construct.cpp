#include "alphamod/construct.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>

#include "alphamod/decomp.hpp"
#include "alphamod/errors.hpp"
#include "alphamod/evolve.hpp"
#include "alphamod/kernels.hpp"
#include "alphamod/norms.hpp"

namespace alphamod {

namespace {

double bracket1(double k) { return std::sqrt(1.0 + k * k); }

double window_map(double alpha, long k) {
  const double kk = static_cast<double>(k);
  return std::pow(bracket1(kk), center_power(alpha)) * kk;
}

template <class Body>
void parallel_points(std::size_t count, Body body) {
  std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

FourierBump piece_bump(const Piece& p) { return FourierBump{{p.center, 0.0, 0.0}, p.width, p.amplitude}; }

// u(0) = (dxi / 2 pi)^d sum_q u^(xi_q).
double value_at_origin(const SpectralField& f) {
  cplx sum = 0.0;
  for (const auto& z : f.coefficients) sum += z;
  return std::abs(sum) * f.grid.spectral_weight();
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return true;
}

// Coefficients below this fraction of the peak are transform round-off.
constexpr double kSupportFloor = 1e-13;

double max_support(const SpectralField& f) {
  const double floor = kSupportFloor * kernels::max_abs(f.coefficients);
  double m = 0.0;
  for (std::size_t i = 0; i < f.coefficients.size(); ++i) {
    if (std::abs(f.coefficients[i]) <= floor) continue;
    const Vec3 xi = frequency(f.grid, i);
    for (int a = 0; a < f.grid.d; ++a) m = std::max(m, std::abs(xi[a]));
  }
  return m;
}

}  // namespace

double center_power(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in [0, 1)");
  return alpha / (1.0 - alpha);
}

long choose_kj(double alpha, long j) {
  if (j < 0) throw InvalidArgument("choose_kj: j must be non-negative");
  const double lo = std::exp2(j + 0.25), hi = std::exp2(j + 0.5);
  // window_map(k) >= k, so the answer is at most ceil(lo).
  long a = 1, b = static_cast<long>(std::ceil(lo));
  while (a < b) {
    const long mid = a + (b - a) / 2;
    if (window_map(alpha, mid) >= lo) {
      b = mid;
    } else {
      a = mid + 1;
    }
  }
  const double h = window_map(alpha, a);
  if (!(h >= lo && h < hi)) {
    throw WindowEmpty("no integer k with <k>^(alpha/(1-alpha)) k in [2^(j+1/4), 2^(j+1/2)) for j = " +
                      std::to_string(j));
  }
  return a;
}

void validate(const SupercriticalDataSpec& spec) {
  if (spec.d < 1 || spec.d > 3) throw InvalidArgument("dimension must be 1, 2 or 3");
  if (spec.kappa < 1) throw InvalidArgument("kappa must be a positive integer");
  center_power(spec.alpha);
  if (!(spec.kappa * spec.d > 2)) throw InvalidArgument("need kappa > 2/d");
  const double s_low = spec.d * spec.alpha / 2.0 - spec.alpha / spec.kappa;
  const double s_high = spec.d / 2.0 - 1.0 / spec.kappa;
  if (!(spec.s > s_low && spec.s < s_high)) {
    throw InvalidArgument("s must lie strictly between s_kappa and s(kappa)");
  }
  if (!(spec.eps > 0.0)) throw InvalidArgument("eps must be positive");
  if (spec.J < 1) throw InvalidArgument("J must be a positive integer");
  if (!(spec.c > 0.0)) throw InvalidArgument("c must be positive");
}

SupercriticalData build_supercritical_u0(const SupercriticalDataSpec& spec, const GridSpec& g) {
  validate(spec);
  if (g.d != spec.d) throw InvalidArgument("grid dimension differs from the data dimension");
  const double a = center_power(spec.alpha);
  const double decay = -(spec.s + spec.d * spec.alpha / 2.0) / (1.0 - spec.alpha);
  SupercriticalData out;
  SumOfBumps bumps;
  for (long j = spec.J; std::exp2(j + 0.25) < g.xi_max; j += spec.J) {
    long k = 0;
    try {
      k = choose_kj(spec.alpha, j);
    } catch (const WindowEmpty&) {
      ++out.empty_windows;
      continue;
    }
    if (k < 3) {
      ++out.skipped_small;
      continue;
    }
    if (spec.max_pieces > 0 && out.pieces.size() == spec.max_pieces) break;
    Piece p;
    p.j = j;
    p.k = k;
    p.bracket = bracket1(static_cast<double>(k));
    p.center = std::pow(p.bracket, a) * static_cast<double>(k);
    p.width = spec.c * std::pow(p.bracket, a);
    const double lnk = std::log(static_cast<double>(k));
    p.amplitude = spec.eps / (lnk * lnk) * std::pow(p.bracket, decay);
    if (p.center + 2.0 * p.width >= g.xi_max) {
      out.truncated_by_band = true;
      break;
    }
    out.pieces.push_back(p);
    bumps.bumps.push_back(piece_bump(p));
  }
  out.u0 = bumps.bumps.empty() ? zero_field(g) : to_physical(sample_spectral(g, bumps));
  return out;
}

Field scaled_data(const SupercriticalDataSpec& spec, double sigma, const GridSpec& g) {
  return scaling_transform(build_supercritical_u0(spec, g).u0, sigma, spec.kappa);
}

NormClaimReport norm_claim_report(const SupercriticalData& data, const SupercriticalDataSpec& spec,
                                  const NormClaimOptions& opts) {
  validate(spec);
  if (data.pieces.size() < 4) throw InvalidArgument("norm_claim_report: fewer than 4 pieces for a fit");
  NormClaimReport rep;
  const Field& u0 = data.u0;
  const GridSpec& g = u0.grid;
  const int d = spec.d;

  {
    ExperimentReport& r = rep.l2_scaling;
    r.experiment = "l2_scaling";
    r.columns = {"sigma", "l2", "ratio", "predicted", "rel_error"};
    r.target = 1.0 / spec.kappa - d / 2.0;
    r.tolerance = 1e-10;
    const double base = l2_norm(u0);
    double worst = 0.0;
    for (double sigma : opts.sigmas) {
      const double v = l2_norm(scaling_transform(u0, sigma, spec.kappa));
      const double predicted = std::pow(sigma, r.target);
      const double err = std::abs(v / base / predicted - 1.0);
      worst = std::max(worst, err);
      r.rows.push_back({sigma, v, v / base, predicted, err});
    }
    r.fit = fit_loglog(r.column("sigma"), r.column("l2"));
    r.metrics["max_rel_error"] = worst;
    r.pass = worst <= r.tolerance;
  }

  {
    ExperimentReport& r = rep.modulation_scaling;
    r.experiment = "modulation_scaling";
    r.columns = {"sigma", "modulation", "C"};
    r.target = (1.0 - spec.alpha) / spec.kappa;
    r.tolerance = opts.slope_tolerance;
    r.rows.resize(opts.sigmas.size());
    parallel_points(opts.sigmas.size(), [&](std::size_t i) {
      const Field v = scaling_transform(u0, opts.sigmas[i], spec.kappa);
      const ModulationNorm m = modulation_norm_detail(to_spectral(v), spec.s, spec.alpha,
                                                      ModulationVariant::smooth, opts.C);
      r.rows[i] = {opts.sigmas[i], m.value, m.C};
    });
    r.fit = fit_loglog(r.column("sigma"), r.column("modulation"));
    r.metrics["heuristic_exponent"] = 1.0 / spec.kappa + spec.s - d * spec.alpha / 2.0;
    r.pass = r.fit.slope >= r.target - r.tolerance;
  }

  {
    ExperimentReport& r = rep.besov_growth;
    r.experiment = "besov_growth";
    r.columns = {"k", "bracket", "contribution", "contribution_ln2", "partial_sup"};
    const double s_crit = d / 2.0 - 1.0 / spec.kappa;
    r.target = (s_crit - spec.s) / (1.0 - spec.alpha);
    r.tolerance = opts.besov_tolerance;
    SumOfBumps partial;
    for (const Piece& p : data.pieces) {
      const double contribution =
          besov_norm_detail(sample_spectral(g, SumOfBumps{{piece_bump(p)}}), s_crit, std::numeric_limits<double>::infinity()).value;
      partial.bumps.push_back(piece_bump(p));
      const double sup = besov_norm_detail(sample_spectral(g, partial), s_crit, std::numeric_limits<double>::infinity()).value;
      const double lnk = std::log(static_cast<double>(p.k));
      r.rows.push_back({static_cast<double>(p.k), p.bracket, contribution, contribution * lnk * lnk, sup});
    }
    r.fit = fit_loglog(r.column("bracket"), r.column("contribution_ln2"));
    r.metrics["partial_sups_increasing"] = strictly_increasing(r.column("partial_sup")) ? 1.0 : 0.0;
    r.pass = std::abs(r.fit.slope - r.target) <= r.tolerance;
  }

  {
    ExperimentReport& r = rep.grid_max;
    r.experiment = "grid_max";
    r.columns = {"n", "xi_max", "pieces", "grid_max", "value_at_zero"};
    r.target = (d * spec.alpha / 2.0 - spec.s) / (1.0 - spec.alpha);
    r.rows.resize(opts.refinements.size());
    parallel_points(opts.refinements.size(), [&](std::size_t i) {
      const GridSpec gi = make_grid(d, opts.refinements[i], g.L);
      const SupercriticalData di = build_supercritical_u0(spec, gi);
      r.rows[i] = {static_cast<double>(gi.n), gi.xi_max, static_cast<double>(di.pieces.size()),
                   lp_norm(di.u0, std::numeric_limits<double>::infinity()), value_at_origin(to_spectral(di.u0))};
    });
    // Each piece adds a positive amount at x = 0; its size against <k>, with
    // the ln^2 k factor removed, decides between growth and convergence.
    std::vector<double> brackets, terms;
    for (const Piece& p : data.pieces) {
      const double lnk = std::log(static_cast<double>(p.k));
      brackets.push_back(p.bracket);
      terms.push_back(value_at_origin(sample_spectral(g, SumOfBumps{{piece_bump(p)}})) * lnk * lnk);
    }
    r.fit = fit_loglog(brackets, terms);
    const std::vector<double> maxima = r.column("grid_max");
    std::vector<double> increments;
    for (std::size_t i = 1; i < maxima.size(); ++i) increments.push_back(maxima[i] - maxima[i - 1]);
    r.metrics["increasing"] = strictly_increasing(maxima) ? 1.0 : 0.0;
    bool shrinking = true;
    for (std::size_t i = 1; i < increments.size(); ++i) shrinking = shrinking && increments[i] < increments[i - 1];
    r.metrics["increments_shrinking"] = shrinking ? 1.0 : 0.0;
    if (spec.alpha > 0.0) {
      r.pass = strictly_increasing(maxima) && maxima.size() >= 4 && r.fit.slope > 0.0;
    } else {
      r.pass = shrinking && r.fit.slope < 0.0;
    }
  }
  return rep;
}

void validate(const IllposedDataSpec& spec) {
  if (spec.N < 8) throw InvalidArgument("N must be an integer >= 8");
  if (spec.d < 1 || spec.d > 3) throw InvalidArgument("dimension must be 1, 2 or 3");
  if (spec.kappa < 1) throw InvalidArgument("kappa must be a positive integer");
  center_power(spec.alpha);
  if (!(spec.c > 0.0)) throw InvalidArgument("c must be positive");
}

namespace {

double illposed_bracket(const IllposedDataSpec& spec) {
  const double N = static_cast<double>(spec.N);
  return std::sqrt(1.0 + spec.d * N * N);
}

}  // namespace

GridSpec illposed_grid(const IllposedDataSpec& spec, std::size_t points_per_width) {
  validate(spec);
  const double a = center_power(spec.alpha);
  const double scale = std::pow(illposed_bracket(spec), a);
  const double center = scale * static_cast<double>(spec.N);
  const double width = spec.c * scale;
  // The packets at +-k separate at relative speed 4 |center|; the box must
  // keep them from meeting again across the periodic boundary before t.
  const double min_half_length = 4.0 * center * inflation_time(spec) + 32.0 / width;
  const double dxi = std::min(width / static_cast<double>(points_per_width),
                              std::numbers::pi / min_half_length);
  const double band = (2.0 * spec.kappa + 1.0) * (center + 2.0 * width) + 2.0 * width;
  std::size_t n = 16;
  while (static_cast<double>(n) * dxi / 2.0 <= band) n *= 2;
  return make_grid(spec.d, n, std::numbers::pi / dxi);
}

Field build_illposed_v0(const IllposedDataSpec& spec, const GridSpec& g) {
  validate(spec);
  if (g.d != spec.d) throw InvalidArgument("grid dimension differs from the data dimension");
  const double a = center_power(spec.alpha);
  const double br = illposed_bracket(spec);
  const double scale = std::pow(br, a);
  const double amp = spec.delta * std::pow(br, -(spec.s + spec.d * spec.alpha / 2.0) / (1.0 - spec.alpha));
  Vec3 c{0.0, 0.0, 0.0}, mc{0.0, 0.0, 0.0};
  for (int i = 0; i < spec.d; ++i) {
    c[i] = scale * static_cast<double>(spec.N);
    mc[i] = -c[i];
  }
  const SumOfBumps b{{FourierBump{c, spec.c * scale, amp}, FourierBump{mc, spec.c * scale, amp}}};
  return to_physical(sample_spectral(g, b));
}

double inflation_time(const IllposedDataSpec& spec) {
  return std::pow(illposed_bracket(spec), -2.0 * spec.alpha / (1.0 - spec.alpha));
}

SpectralField taylor_coefficient(const Field& v0, double t, int kappa) {
  if (!(t >= 0.0)) throw InvalidArgument("taylor_coefficient: t must be non-negative");
  if (kappa < 1) throw InvalidArgument("kappa must be a positive integer");
  const GridSpec& g = v0.grid;
  const SpectralField vh = to_spectral(v0);
  if ((2.0 * kappa + 1.0) * max_support(vh) >= g.xi_max) {
    throw AliasingError("taylor_coefficient: the product of the data leaves the band");
  }
  const std::vector<double> xi2 = frequency_norm2(g);
  auto forcing = [&](double tau) {
    SpectralField w = vh;
    kernels::dispersion_phase(w.coefficients, xi2, tau);
    const Field u = to_physical(w);
    Field p = zero_field(g);
    kernels::power_nonlinearity(u.values, kappa, p.values);
    return to_spectral(p);
  };
  DuhamelOptions o;
  o.tol = 1e-12;
  return duhamel(std::function<SpectralField(double)>(forcing), t, o).value;
}

SpectralField taylor_coefficient(const Field& v0, double t) { return taylor_coefficient(v0, t, 1); }

SpectralField taylor_coefficient_resonant(const Field& v0, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("taylor_coefficient_resonant: t must be non-negative");
  const GridSpec& g = v0.grid;
  const SpectralField vh = to_spectral(v0);
  struct Mode {
    std::array<long, 3> q;
    long q2;
    cplx value;
  };
  std::vector<Mode> support;
  const double floor = kSupportFloor * kernels::max_abs(vh.coefficients);
  for (std::size_t i = 0; i < vh.coefficients.size(); ++i) {
    if (std::abs(vh.coefficients[i]) <= floor) continue;
    const auto m = unflatten(g, i);
    Mode mode{{0, 0, 0}, 0, vh.coefficients[i]};
    for (int a = 0; a < g.d; ++a) {
      mode.q[a] = signed_index(m[a], g.n);
      mode.q2 += mode.q[a] * mode.q[a];
    }
    support.push_back(mode);
  }
  SpectralField out = zero_spectrum(g);
  const long half = static_cast<long>(g.n / 2);
  const double dxi2 = g.dxi * g.dxi;
  for (const Mode& m1 : support) {
    for (const Mode& m2 : support) {
      const cplx pair = m1.value * m2.value;
      for (const Mode& m3 : support) {
        std::array<std::size_t, 3> pos{0, 0, 0};
        long q2 = 0;
        for (int a = 0; a < g.d; ++a) {
          const long q = m1.q[a] + m2.q[a] - m3.q[a];
          if (q < -half || q >= half) {
            throw AliasingError("taylor_coefficient_resonant: the product of the data leaves the band");
          }
          q2 += q * q;
          pos[a] = wrap_index(q, g.n);
        }
        // Integer resonance function in lattice units.
        const long pq = q2 - m1.q2 - m2.q2 + m3.q2;
        cplx factor(t, 0.0);
        if (pq != 0) {
          const double P = dxi2 * static_cast<double>(pq);
          factor = (std::exp(cplx(0.0, t * P)) - 1.0) / cplx(0.0, P);
        }
        out.coefficients[flatten(g, pos)] += pair * std::conj(m3.value) * factor;
      }
    }
  }
  const double w = g.spectral_weight() * g.spectral_weight();
  const std::vector<double> xi2 = frequency_norm2(g);
  kernels::scale(out.coefficients, w);
  kernels::dispersion_phase(out.coefficients, xi2, t);
  return out;
}

double inflation_exponent(double s, double alpha, int kappa, int d) {
  return (2.0 * kappa * (d * alpha / 2.0 - s) - 2.0 * alpha) / (1.0 - alpha);
}

ExperimentReport inflation_sweep(const InflationOptions& opts) {
  if (opts.N.size() < 4) throw InvalidArgument("inflation_sweep: fewer than 4 values of N");
  if (opts.method == TaylorMethod::resonant && opts.kappa != 1) {
    throw InvalidArgument("inflation_sweep: the resonant sum needs kappa = 1");
  }
  ExperimentReport r;
  r.experiment = "inflation";
  r.columns = {"N", "bracket", "t", "n", "data_norm", "taylor_norm"};
  r.target = inflation_exponent(opts.s, opts.alpha, opts.kappa, opts.d);
  r.tolerance = opts.tolerance;
  r.rows.resize(opts.N.size());
  parallel_points(opts.N.size(), [&](std::size_t i) {
    IllposedDataSpec spec;
    spec.N = opts.N[i];
    spec.s = opts.s;
    spec.alpha = opts.alpha;
    spec.kappa = opts.kappa;
    spec.d = opts.d;
    const GridSpec g = illposed_grid(spec, opts.points_per_width);
    const Field v0 = build_illposed_v0(spec, g);
    const double t = inflation_time(spec);
    const SpectralField T = opts.method == TaylorMethod::resonant ? taylor_coefficient_resonant(v0, t)
                                                                  : taylor_coefficient(v0, t, opts.kappa);
    const double C = opts.C > 0.0 ? opts.C : calibrate_c(g, opts.alpha);
    const DecompositionSymbols symbols = alpha_symbols(g, opts.alpha, C);
    const double data = modulation_norm_detail(to_spectral(v0), opts.s, symbols).value;
    const double taylor = modulation_norm_detail(T, opts.s, symbols).value;
    r.rows[i] = {static_cast<double>(spec.N), illposed_bracket(spec), t, static_cast<double>(g.n), data, taylor};
  });
  r.fit = fit_loglog(r.column("bracket"), r.column("taylor_norm"));
  const double s_kappa = opts.d * opts.alpha / 2.0 - opts.alpha / opts.kappa;
  r.metrics["s_kappa"] = s_kappa;
  r.metrics["control"] = opts.s > s_kappa ? 1.0 : 0.0;
  r.pass = opts.s > s_kappa ? r.fit.slope <= 0.0 : std::abs(r.fit.slope - r.target) <= r.tolerance;
  return r;
}

}  // namespace alphamod
