#include "alphamod/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

#include "alphamod/bump.hpp"
#include "alphamod/decomp.hpp"
#include "alphamod/errors.hpp"
#include "alphamod/kernels.hpp"
#include "alphamod/norms.hpp"
#include "alphamod/quadrature.hpp"

namespace alphamod {

namespace {

struct Refined {
  double value = 0.0;
  std::size_t nodes = 0;
  double last_change = 0.0;
  bool converged = false;
};

// Composite Simpson (or the sampled maximum) of f on [a, b]; each doubling
// evaluates only the new midpoints.
Refined simpson_doubling(const std::function<double(double)>& f, double a, double b,
                         std::size_t intervals, double rel_tol, std::size_t max_doublings,
                         bool sup) {
  intervals += intervals % 2;
  std::vector<double> vals(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    vals[i] = f(a + (b - a) * static_cast<double>(i) / static_cast<double>(intervals));
  }
  auto estimate = [&] {
    if (sup) return *std::max_element(vals.begin(), vals.end());
    const double h = (b - a) / static_cast<double>(vals.size() - 1);
    double s = vals.front() + vals.back();
    for (std::size_t i = 1; i + 1 < vals.size(); ++i) s += (i % 2 ? 4.0 : 2.0) * vals[i];
    return s * h / 3.0;
  };
  Refined out;
  out.value = estimate();
  out.nodes = vals.size();
  out.last_change = kInf;
  for (std::size_t level = 0; level < max_doublings; ++level) {
    const std::size_t m = vals.size() - 1;
    std::vector<double> next(2 * m + 1);
    for (std::size_t i = 0; i <= m; ++i) next[2 * i] = vals[i];
    for (std::size_t i = 0; i < m; ++i) {
      next[2 * i + 1] = f(a + (b - a) * (2.0 * i + 1.0) / (2.0 * m));
    }
    vals = std::move(next);
    const double v = estimate();
    out.last_change = std::abs(v - out.value) / std::max(std::abs(v), 1e-300);
    out.value = v;
    out.nodes = vals.size();
    if (out.last_change < rel_tol || v == 0.0) {
      out.converged = true;
      break;
    }
  }
  return out;
}

// Free evolution at arbitrary times from a cached spectrum.
class FreeWave {
 public:
  explicit FreeWave(const SpectralField& f0) : f0_(f0), xi2_(frequency_norm2(f0.grid)) {}
  explicit FreeWave(const Field& u0) : FreeWave(to_spectral(u0)) {}

  Field at(double t) const {
    SpectralField f = f0_;
    kernels::dispersion_phase(f.coefficients, xi2_, t);
    return to_physical(f);
  }

 private:
  SpectralField f0_;
  std::vector<double> xi2_;
};

// Runs body(i) for i < count in parallel and rethrows the first failure.
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

double bump_max_frequency(const FourierBump& b) {
  double c2 = 0.0;
  for (double c : b.center) c2 += c * c;
  return std::sqrt(c2) + 2.0 * b.width;
}

Field sample_bump(const GridSpec& g, const FourierBump& b) {
  return to_physical(sample_spectral(g, SumOfBumps{{b}}));
}

}  // namespace

bool check_admissible(double q, double r, int d) {
  if (!(q >= 2.0) || !(r >= 2.0)) return false;
  if (q == 2.0 && std::isinf(r) && d == 2) return false;
  const double inv_r = std::isinf(r) ? 0.0 : 1.0 / r;
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
  return 0.5 - inv_r - 2.0 * inv_q / d >= -1e-14;
}

double strichartz_exponent(double alpha, double q, double r, int d) {
  const double inv_r = std::isinf(r) ? 0.0 : 1.0 / r;
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
  return d * alpha / (1.0 - alpha) * (0.5 - inv_r - 2.0 * inv_q / d);
}

SpaceTimeResult space_time_norm(const Field& u0, double q, double r, double T,
                                const SpaceTimeOptions& opts) {
  if (!(q >= 1.0) || !(r >= 1.0)) throw InvalidArgument("space_time_norm: exponents must be >= 1");
  if (!(T > 0.0)) throw InvalidArgument("space_time_norm: window must be positive");
  const FreeWave wave(u0);
  const bool sup = std::isinf(q);
  std::function<double(double)> integrand;
  double a = -T, b = T;
  if (opts.time_scale > 0.0) {
    const double tau = opts.time_scale;
    b = std::asinh(T / tau);
    a = -b;
    integrand = [&, tau](double u) {
      const double norm = lp_norm(wave.at(tau * std::sinh(u)), r);
      return sup ? norm : std::pow(norm, q) * tau * std::cosh(u);
    };
  } else {
    integrand = [&](double t) {
      const double norm = lp_norm(wave.at(t), r);
      return sup ? norm : std::pow(norm, q);
    };
  }
  const Refined res = simpson_doubling(integrand, a, b, opts.initial_intervals, opts.rel_tol,
                                       opts.max_doublings, sup);
  if (!res.converged) {
    throw NonConvergence("space_time_norm: time quadrature did not settle after " +
                         std::to_string(opts.max_doublings) + " doublings");
  }
  SpaceTimeResult out;
  out.value = sup ? res.value : std::pow(res.value, 1.0 / q);
  out.nodes = res.nodes;
  out.last_change = res.last_change;
  return out;
}

double space_time_norm(const Trajectory& traj, double q, double r) {
  const auto& snaps = traj.snapshots;
  if (snaps.empty()) throw InvalidArgument("space_time_norm: empty trajectory");
  std::vector<double> norms;
  for (const auto& s : snaps) norms.push_back(lp_norm(s.field, r));
  if (std::isinf(q)) return *std::max_element(norms.begin(), norms.end());
  double sum = 0.0;
  for (std::size_t i = 1; i < snaps.size(); ++i) {
    sum += 0.5 * (snaps[i].t - snaps[i - 1].t) * (std::pow(norms[i], q) + std::pow(norms[i - 1], q));
  }
  return std::pow(sum, 1.0 / q);
}

ExperimentReport strichartz_sweep(const StrichartzOptions& opts) {
  const GridSpec& g = opts.grid;
  if (!check_admissible(opts.q, opts.r, g.d)) throw InvalidArgument("strichartz_sweep: pair not admissible");
  if (opts.k.size() < 2) throw InvalidArgument("strichartz_sweep: need at least two scales");
  ExperimentReport rep;
  rep.experiment = "strichartz";
  rep.columns = {"k", "bracket", "center", "width", "T", "nodes", "measured", "data_norm", "predicted", "ratio"};
  rep.target = strichartz_exponent(opts.alpha, opts.q, opts.r, g.d);
  rep.tolerance = opts.tolerance;
  rep.rows.resize(opts.k.size());
  parallel_points(opts.k.size(), [&](std::size_t i) {
    const LatticeIndex k{opts.k[i], 0, 0};
    const AlphaIndex idx = make_alpha_index(k, g.d, opts.alpha, opts.C);
    FourierBump b{idx.center, opts.width_fraction * idx.radius, 1.0};
    const double T = opts.T0 / (b.width * b.width);
    // Group velocities span 8 w, so the packet covers 8 w T of the period 2 L.
    if (8.0 * b.width * T >= 2.0 * g.L) {
      throw InvalidArgument("strichartz_sweep: packet at k = " + std::to_string(opts.k[i]) +
                            " wraps onto itself within the window");
    }
    const Field u0 = sample_bump(g, b);
    SpaceTimeOptions time = opts.time;
    time.time_scale = 1.0 / (b.width * b.width);
    const SpaceTimeResult st = space_time_norm(u0, opts.q, opts.r, T, time);
    const double data = l2_norm(u0);
    const double predicted = std::pow(idx.bracket, rep.target) * data;
    rep.rows[i] = {static_cast<double>(opts.k[i]), idx.bracket, idx.center[0], b.width, T,
                   static_cast<double>(st.nodes), st.value, data, predicted, st.value / predicted};
  });
  std::vector<double> x, y;
  double lo = kInf, hi = 0.0;
  for (const auto& row : rep.rows) {
    x.push_back(row[1]);
    y.push_back(row[6] / row[7]);
    lo = std::min(lo, row[9]);
    hi = std::max(hi, row[9]);
  }
  rep.fit = fit_loglog(x, y);
  rep.metrics["ratio_spread"] = hi / lo;
  rep.pass = std::abs(rep.fit.slope - rep.target) <= rep.tolerance;
  if (opts.alpha == 0.0) rep.pass = rep.pass && hi / lo <= 2.0;
  return rep;
}

double bilinear_separation(const BilinearExperiment& e) {
  const double gap = std::abs(e.first.center[e.axis] - e.second.center[e.axis]);
  return gap - 2.0 * e.first.width - 2.0 * e.second.width;
}

double transverse_measure(const FourierBump& b, int d) {
  const double rho = 2.0 * b.width;
  if (d == 1) return 1.0;
  if (d == 2) return 2.0 * rho;
  return std::numbers::pi * rho * rho;
}

BilinearResult bilinear_measure(const GridSpec& g, const BilinearExperiment& e,
                                const BilinearOptions& opts) {
  if (e.axis < 0 || e.axis >= g.d) throw InvalidArgument("bilinear_measure: axis out of range");
  BilinearResult out;
  out.separation = bilinear_separation(e);
  if (!(out.separation > 0.0)) throw InvalidArgument("bilinear_measure: supports are not separated");
  out.transverse = std::min(transverse_measure(e.first, g.d), transverse_measure(e.second, g.d));
  const FreeWave w1(sample_spectral(g, SumOfBumps{{e.first}}));
  const FreeWave w2(sample_spectral(g, SumOfBumps{{e.second}}));
  const Field u0 = w1.at(0.0), v0 = w2.at(0.0);
  out.predicted = std::pow(out.separation, -0.5) * std::sqrt(out.transverse) * l2_norm(u0) * l2_norm(v0);
  const bool cu = e.pattern == Conjugation::conj_u_v || e.pattern == Conjugation::conj_u_conj_v;
  const bool cv = e.pattern == Conjugation::u_conj_v || e.pattern == Conjugation::conj_u_conj_v;
  const double dv = g.cell_volume();
  auto integrand = [&](double t) {
    const Field u = w1.at(t), v = w2.at(t);
    double s = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
      const cplx a = cu ? std::conj(u.values[i]) : u.values[i];
      const cplx b = cv ? std::conj(v.values[i]) : v.values[i];
      s += std::norm(a * b);
    }
    return s * dv;
  };
  const double vmax = std::max(bump_max_frequency(e.first), bump_max_frequency(e.second));
  double T = e.T > 0.0 ? e.T : 1.0 / (std::min(e.first.width, e.second.width) * out.separation);
  auto window = [&](double half) {
    if (2.0 * vmax * half >= g.L) {
      throw InvalidArgument("bilinear_measure: packets wrap around the box within the window");
    }
    const Refined r = simpson_doubling(integrand, -half, half, opts.initial_intervals, opts.rel_tol,
                                       opts.max_refinements, false);
    if (!r.converged) throw NonConvergence("bilinear_measure: time quadrature did not settle");
    return r;
  };
  Refined prev = window(T);
  for (std::size_t k = 0;; ++k) {
    if (k == opts.max_tail_doublings) {
      throw NonConvergence("bilinear_measure: tail criterion unmet after " +
                           std::to_string(opts.max_tail_doublings) + " window doublings");
    }
    const Refined next = window(2.0 * T);
    const double change = std::abs(next.value - prev.value) / std::max(next.value, 1e-300);
    T *= 2.0;
    prev = next;
    if (change < opts.tail_tol) break;
  }
  out.value = std::sqrt(prev.value);
  out.T = T;
  out.nodes = prev.nodes;
  return out;
}

ExperimentReport bilinear_sweep(const BilinearSweepOptions& opts) {
  const GridSpec& g = opts.grid;
  ExperimentReport rep;
  rep.experiment = "bilinear";
  rep.columns = {"separation", "T", "nodes", "measured", "predicted", "oracle"};
  rep.target = -0.5;
  rep.tolerance = opts.tolerance;
  rep.rows.resize(opts.separations.size());
  parallel_points(opts.separations.size(), [&](std::size_t i) {
    const double gap = opts.separations[i] + 2.0 * opts.first.width + 2.0 * opts.second.width;
    BilinearExperiment e;
    e.first = opts.first;
    e.second = opts.second;
    e.axis = opts.axis;
    e.pattern = opts.pattern;
    e.first.center[opts.axis] = -0.5 * gap;
    e.second.center[opts.axis] = 0.5 * gap;
    const BilinearResult r = bilinear_measure(g, e, opts.measure);
    const double oracle =
        g.d == 1 ? bilinear_oracle_1d(e.first, e.second) : std::numeric_limits<double>::quiet_NaN();
    rep.rows[i] = {r.separation, r.T, static_cast<double>(r.nodes), r.value, r.predicted, oracle};
  });
  rep.fit = fit_loglog(rep.column("separation"), rep.column("measured"));
  rep.pass = std::abs(rep.fit.slope - rep.target) <= rep.tolerance;
  return rep;
}

double bilinear_oracle_1d(const std::function<double(double)>& abs_phi1,
                          std::pair<double, double> support1,
                          const std::function<double(double)>& abs_phi2,
                          std::pair<double, double> support2, std::size_t panels) {
  const bool disjoint = support1.second <= support2.first || support2.second <= support1.first;
  if (!disjoint) throw InvalidArgument("bilinear_oracle_1d: supports overlap");
  const QuadratureRule r1 = composite_gauss_legendre(panels, 8, support1.first, support1.second);
  const QuadratureRule r2 = composite_gauss_legendre(panels, 8, support2.first, support2.second);
  std::vector<double> p2(r2.nodes.size());
  for (std::size_t j = 0; j < r2.nodes.size(); ++j) {
    const double a = abs_phi2(r2.nodes[j]);
    p2[j] = a * a * r2.weights[j];
  }
  double total = 0.0;
  for (std::size_t i = 0; i < r1.nodes.size(); ++i) {
    const double a = abs_phi1(r1.nodes[i]);
    const double w = a * a * r1.weights[i];
    if (w == 0.0) continue;
    double inner = 0.0;
    for (std::size_t j = 0; j < r2.nodes.size(); ++j) {
      inner += p2[j] / (2.0 * std::abs(r1.nodes[i] - r2.nodes[j]));
    }
    total += w * inner;
  }
  const double two_pi = 2.0 * std::numbers::pi;
  return std::sqrt(total / (two_pi * two_pi));
}

double bilinear_oracle_1d(const FourierBump& first, const FourierBump& second, std::size_t panels) {
  auto profile = [](const FourierBump& b) {
    return [b](double xi) { return std::abs(b.amplitude) * bump_radial(std::abs(xi - b.center[0]) / b.width); };
  };
  auto support = [](const FourierBump& b) {
    return std::make_pair(b.center[0] - 2.0 * b.width, b.center[0] + 2.0 * b.width);
  };
  return bilinear_oracle_1d(profile(first), support(first), profile(second), support(second), panels);
}

}  // namespace alphamod
