#include "alphamod/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "alphamod/decomp.hpp"
#include "alphamod/kernels.hpp"
#include "alphamod/norms.hpp"
#include "alphamod/quadrature.hpp"

namespace alphamod {

namespace {

bool all_finite(const std::vector<cplx>& v) {
  for (const auto& z : v) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// 1 inside the 2/3 band on every axis, 0 outside.
std::vector<double> dealias_mask(const GridSpec& g) {
  std::vector<double> mask(g.size(), 1.0);
  const long cut = static_cast<long>(g.n / 3);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const auto m = unflatten(g, i);
    for (int a = 0; a < g.d; ++a) {
      if (std::abs(signed_index(m[a], g.n)) > cut) mask[i] = 0.0;
    }
  }
  return mask;
}

double spectral_grad2(const SpectralField& uh, const std::vector<double>& xi2) {
  double s = 0.0;
  for (std::size_t i = 0; i < xi2.size(); ++i) s += xi2[i] * std::norm(uh.coefficients[i]);
  return s * uh.grid.spectral_weight();
}

// Split-step state sharing the symbol tables across steps.
class Stepper {
 public:
  Stepper(const GridSpec& g, const EvolutionConfig& cfg)
      : cfg_(cfg), xi2_(frequency_norm2(g)), mask_(cfg.dealias ? dealias_mask(g) : std::vector<double>{}) {}

  Field step(const Field& u, double h) const {
    SpectralField uh = to_spectral(u);
    kernels::dispersion_phase(uh.coefficients, xi2_, 0.5 * h);
    Field v = to_physical(uh);
    kernels::nonlinear_phase(v.values, cfg_.lambda * h, cfg_.kappa);
    uh = to_spectral(v);
    if (!mask_.empty()) kernels::multiply(uh.coefficients, mask_);
    kernels::dispersion_phase(uh.coefficients, xi2_, 0.5 * h);
    return to_physical(uh);
  }

  const std::vector<double>& xi2() const { return xi2_; }

 private:
  EvolutionConfig cfg_;
  std::vector<double> xi2_;
  std::vector<double> mask_;
};

}  // namespace

void validate(const EvolutionConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (cfg.kappa < 1) throw InvalidArgument("kappa must be a positive integer");
  if (!(cfg.t_end >= 0.0)) throw InvalidArgument("final time must be non-negative");
  if (cfg.snapshot_stride == 0) throw InvalidArgument("snapshot stride must be positive");
}

SpectralField free_propagate(const SpectralField& f, double t) {
  SpectralField out = f;
  kernels::dispersion_phase(out.coefficients, frequency_norm2(f.grid), t);
  return out;
}

Field free_propagate(const Field& f, double t) { return to_physical(free_propagate(to_spectral(f), t)); }

Field nonlinear_phase_step(const Field& u, double dt, double lambda, int kappa) {
  Field out = u;
  kernels::nonlinear_phase(out.values, lambda * dt, kappa);
  return out;
}

Field strang_step(const Field& u, const EvolutionConfig& cfg) {
  validate(cfg);
  return Stepper(u.grid, cfg).step(u, cfg.dt);
}

double mass(const Field& u) { return kernels::sum_abs2(u.values) * u.grid.cell_volume(); }

double grad_norm(const Field& u) {
  return std::sqrt(spectral_grad2(to_spectral(u), frequency_norm2(u.grid)));
}

double energy(const Field& u, double lambda, int kappa) {
  const double kinetic = spectral_grad2(to_spectral(u), frequency_norm2(u.grid));
  if (lambda == 0.0) return kinetic;
  const double potential =
      kernels::sum_abs_pow(u.values, 2.0 * kappa + 2.0) * u.grid.cell_volume();
  return kinetic - lambda / (kappa + 1.0) * potential;
}

Vec3 virial_momentum(const Field& u, bool strict) {
  const GridSpec& g = u.grid;
  if (strict && boundary_ratio(u) > 1e-6) {
    throw BoundaryWarning("field amplitude at the box boundary exceeds 1e-6 of its peak");
  }
  const SpectralField uh = to_spectral(u);
  Vec3 out{0.0, 0.0, 0.0};
  for (int a = 0; a < g.d; ++a) {
    SpectralField du = uh;
    for (std::size_t i = 0; i < du.coefficients.size(); ++i) {
      du.coefficients[i] *= cplx(0.0, frequency(g, i)[a]);
    }
    const Field grad = to_physical(du);
    double s = 0.0;
    for (std::size_t i = 0; i < grad.values.size(); ++i) {
      s += position(g, i)[a] * (std::conj(u.values[i]) * grad.values[i]).imag();
    }
    out[a] = s * g.cell_volume();
  }
  return out;
}

Diagnostics diagnose(const Field& u, double t, double lambda, int kappa) {
  Diagnostics d;
  d.t = t;
  d.mass = mass(u);
  d.energy = energy(u, lambda, kappa);
  d.grad_norm = grad_norm(u);
  d.virial = virial_momentum(u, false);
  return d;
}

Trajectory evolve(const Field& u0, const EvolutionConfig& cfg) {
  validate(cfg);
  require_finite(u0);
  const GridSpec& g = u0.grid;
  Stepper stepper(g, cfg);
  Trajectory traj;
  traj.config = cfg;
  auto record = [&](const Field& u, double t) {
    traj.snapshots.push_back(Snapshot{t, u});
    traj.diagnostics.push_back(diagnose(u, t, cfg.lambda, cfg.kappa));
  };
  record(u0, 0.0);
  if (cfg.t_end == 0.0) return traj;

  const bool adaptive = cfg.max_phase_per_step > 0.0 && cfg.lambda != 0.0;
  const std::size_t nominal =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.dt - 1e-9)));
  const double h0 = cfg.t_end / static_cast<double>(nominal);

  Field u = u0;
  double t = 0.0;
  std::size_t steps = 0;
  while (t < cfg.t_end) {
    double h = adaptive ? std::min(h0, cfg.t_end - t) : h0;
    if (adaptive) {
      const double peak = kernels::max_abs(u.values);
      const double rate = std::abs(cfg.lambda) * ipow(peak * peak, cfg.kappa);
      if (rate > 0.0) h = std::min(h, cfg.max_phase_per_step / rate);
    }
    Field next = stepper.step(u, h);
    const double t_next = adaptive ? t + h : h0 * static_cast<double>(steps + 1);
    std::string reason;
    if (!all_finite(next.values)) {
      reason = "non-finite values";
    } else {
      const SpectralField nh = to_spectral(next);
      const double grad = std::sqrt(spectral_grad2(nh, stepper.xi2()));
      const double norm = l2_norm(next);
      if (grad > g.xi_max * norm / 2.0) reason = "resolution exhausted";
    }
    if (!reason.empty()) {
      if (traj.snapshots.back().t < t) record(u, t);
      std::ostringstream msg;
      msg << "evolution stopped at t = " << t << ": " << reason;
      throw BlowupDetected(msg.str(), t, std::move(traj));
    }
    u = std::move(next);
    t = t_next;
    ++steps;
    if (!adaptive && steps == nominal) t = cfg.t_end;
    if (steps % cfg.snapshot_stride == 0 || t >= cfg.t_end) record(u, t);
  }
  return traj;
}

DuhamelResult duhamel(const std::function<SpectralField(double)>& forcing, double t,
                      const DuhamelOptions& opts) {
  if (!(t >= 0.0)) throw InvalidArgument("duhamel time must be non-negative");
  DuhamelResult prev;
  bool have_prev = false;
  for (std::size_t m = std::max<std::size_t>(1, opts.initial_nodes);; m *= 2) {
    SpectralField acc;
    bool first = true;
    std::vector<double> xi2;
    if (t > 0.0) {
      const QuadratureRule rule = gauss_legendre(m, 0.0, t);
      for (std::size_t i = 0; i < m; ++i) {
        SpectralField f = forcing(rule.nodes[i]);
        if (first) {
          xi2 = frequency_norm2(f.grid);
          acc = zero_spectrum(f.grid);
          first = false;
        }
        kernels::dispersion_phase(f.coefficients, xi2, t - rule.nodes[i]);
        for (std::size_t e = 0; e < f.coefficients.size(); ++e) {
          acc.coefficients[e] += rule.weights[i] * f.coefficients[e];
        }
      }
    } else {
      acc = forcing(0.0);
      std::fill(acc.coefficients.begin(), acc.coefficients.end(), cplx(0.0, 0.0));
    }
    const double norm = l2_norm(acc);
    if (norm == 0.0) return DuhamelResult{std::move(acc), m, 0.0};
    if (have_prev) {
      SpectralField diff = acc;
      for (std::size_t e = 0; e < diff.coefficients.size(); ++e) {
        diff.coefficients[e] -= prev.value.coefficients[e];
      }
      const double change = l2_norm(diff) / norm;
      if (change < opts.tol) return DuhamelResult{std::move(acc), m, change};
      prev.last_change = change;
    }
    if (2 * m > opts.max_nodes) {
      std::ostringstream msg;
      msg << "duhamel quadrature did not settle within " << opts.max_nodes << " nodes";
      throw NonConvergence(msg.str());
    }
    prev.value = std::move(acc);
    prev.nodes = m;
    have_prev = true;
  }
}

Field duhamel(const std::function<Field(double)>& forcing, double t, const DuhamelOptions& opts) {
  auto spectral = [&](double tau) { return to_spectral(forcing(tau)); };
  return to_physical(duhamel(std::function<SpectralField(double)>(spectral), t, opts).value);
}

PicardResult picard_solve(const Field& u0, const EvolutionConfig& cfg, const PicardOptions& opts) {
  validate(cfg);
  require_finite(u0);
  const GridSpec& g = u0.grid;
  const double T = cfg.t_end;
  const double C = opts.C > 0.0 ? opts.C : calibrate_c(g, opts.alpha);
  const DecompositionSymbols symbols = alpha_symbols(g, opts.alpha, C);
  const auto xi2 = frequency_norm2(g);
  const SpectralField u0h = to_spectral(u0);

  PicardResult res;
  res.data_norm = modulation_norm_detail(u0h, opts.s, symbols).value;
  res.small_data = res.data_norm <= opts.small_data_threshold;

  // Interaction picture: w(t) = S(-t) u(t) = u0^ + Dw(t) with
  // Dw(t) = i int_0^t S(-tau) F(u(tau)) dtau.
  const std::size_t m = opts.nodes_per_panel;
  const std::size_t P = T > 0.0 ? opts.panels : 0;
  const QuadratureRule ref = gauss_legendre(m);
  const auto Lint = lagrange_integration_matrix(ref.nodes);
  const double h = P > 0 ? T / static_cast<double>(P) : 0.0;
  std::vector<double> times;
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t i = 0; i < m; ++i) times.push_back(h * p + 0.5 * h * (ref.nodes[i] + 1.0));
  }
  const std::size_t nodes = times.size();
  const std::size_t N = g.size();
  // Dw at every node plus the end point.
  std::vector<std::vector<cplx>> D(nodes + 1, std::vector<cplx>(N, cplx(0.0, 0.0)));
  std::vector<std::vector<cplx>> G(nodes, std::vector<cplx>(N));
  auto m_norm = [&](const std::vector<cplx>& c) {
    return modulation_norm_detail(SpectralField{g, c}, opts.s, symbols).value;
  };

  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    // Nonlinearity at every node from the current iterate.
    for (std::size_t k = 0; k < nodes; ++k) {
      SpectralField uh{g, u0h.coefficients};
      for (std::size_t e = 0; e < N; ++e) uh.coefficients[e] += D[k][e];
      kernels::dispersion_phase(uh.coefficients, xi2, times[k]);
      Field u = to_physical(uh);
      Field F = zero_field(g);
      kernels::power_nonlinearity(u.values, cfg.kappa, F.values);
      kernels::scale(F.values, cfg.lambda);
      SpectralField Fh = to_spectral(F);
      kernels::dispersion_phase(Fh.coefficients, xi2, -times[k]);
      G[k] = std::move(Fh.coefficients);
    }
    // New Duhamel part by panel-wise Lagrange integration.
    std::vector<std::vector<cplx>> Dn(nodes + 1, std::vector<cplx>(N, cplx(0.0, 0.0)));
    std::vector<cplx> base(N, cplx(0.0, 0.0));
    const cplx ihalf(0.0, 0.5 * h);
    for (std::size_t p = 0; p < P; ++p) {
      for (std::size_t i = 0; i < m; ++i) {
        auto& out = Dn[p * m + i];
        out = base;
        for (std::size_t j = 0; j < m; ++j) {
          const cplx w = ihalf * Lint[i][j];
          const auto& gj = G[p * m + j];
          for (std::size_t e = 0; e < N; ++e) out[e] += w * gj[e];
        }
      }
      for (std::size_t j = 0; j < m; ++j) {
        const cplx w = ihalf * ref.weights[j];
        const auto& gj = G[p * m + j];
        for (std::size_t e = 0; e < N; ++e) base[e] += w * gj[e];
      }
    }
    Dn[nodes] = base;

    double diff = 0.0, size = 0.0;
    bool finite = true;
    for (std::size_t k = 0; k <= nodes; ++k) {
      std::vector<cplx> delta(N);
      for (std::size_t e = 0; e < N; ++e) delta[e] = Dn[k][e] - D[k][e];
      finite = finite && all_finite(Dn[k]);
      if (!finite) break;
      diff = std::max(diff, m_norm(delta));
      size = std::max(size, m_norm(Dn[k]));
    }
    res.iterations = it;
    if (!finite || !std::isfinite(diff)) {
      res.differences.push_back(std::numeric_limits<double>::infinity());
      res.ratios.push_back(std::numeric_limits<double>::infinity());
      throw ContractionFailure("picard iteration produced non-finite values", res.ratios);
    }
    if (!res.differences.empty()) {
      const double prev = res.differences.back();
      res.ratios.push_back(prev > 0.0 ? diff / prev : 0.0);
    }
    res.differences.push_back(diff);
    D = std::move(Dn);
    // At least two iterations so a contraction factor exists, except when
    // the first correction vanishes identically.
    const bool settled = diff == 0.0 || (it >= 2 && diff <= opts.tol * (res.data_norm + size));
    if (settled) {
      res.converged = true;
      break;
    }
    const std::size_t r = res.ratios.size();
    if (r >= 3 && res.ratios[r - 1] >= 1.0 && res.ratios[r - 2] >= 1.0 && res.ratios[r - 3] >= 1.0) {
      throw ContractionFailure("picard iteration is not contracting", res.ratios);
    }
  }
  if (!res.converged) {
    throw ContractionFailure("picard iteration did not converge within max_iter", res.ratios);
  }

  res.trajectory.config = cfg;
  auto push = [&](double t, const std::vector<cplx>& Dk) {
    SpectralField uh{g, u0h.coefficients};
    for (std::size_t e = 0; e < N; ++e) uh.coefficients[e] += Dk[e];
    kernels::dispersion_phase(uh.coefficients, xi2, t);
    Field u = to_physical(uh);
    res.trajectory.diagnostics.push_back(diagnose(u, t, cfg.lambda, cfg.kappa));
    res.trajectory.snapshots.push_back(Snapshot{t, std::move(u)});
  };
  push(0.0, std::vector<cplx>(N, cplx(0.0, 0.0)));
  for (std::size_t k = 0; k < nodes; ++k) push(times[k], D[k]);
  if (T > 0.0) push(T, D[nodes]);
  return res;
}

namespace {

void require_power_of_two(double sigma) {
  int e = 0;
  const double mant = std::frexp(sigma, &e);
  if (!(sigma > 0.0) || mant != 0.5) throw InvalidArgument("sigma must be a power of two");
}

}  // namespace

Field scaling_transform(const Field& u, double sigma, int kappa) {
  require_power_of_two(sigma);
  if (kappa < 1) throw InvalidArgument("kappa must be a positive integer");
  Field out{make_grid(u.grid.d, u.grid.n, u.grid.L / sigma), u.values};
  kernels::scale(out.values, std::pow(sigma, 1.0 / kappa));
  return out;
}

Field scaling_transform(const Field& u, double sigma, int kappa, const GridSpec& target,
                        double alias_tol) {
  require_power_of_two(sigma);
  if (kappa < 1) throw InvalidArgument("kappa must be a positive integer");
  const GridSpec& src = u.grid;
  if (target.d != src.d) throw InvalidArgument("target grid has a different dimension");
  // Content of u above xi_max(target) / sigma would alias on the target.
  const double band = target.xi_max / sigma;
  const SpectralField uh = to_spectral(u);
  double outside = 0.0, total = 0.0;
  for (std::size_t i = 0; i < uh.coefficients.size(); ++i) {
    const double a2 = std::norm(uh.coefficients[i]);
    total += a2;
    const Vec3 xi = frequency(src, i);
    bool out_of_band = false;
    for (int a = 0; a < src.d; ++a) out_of_band = out_of_band || std::abs(xi[a]) >= band;
    if (out_of_band) outside += a2;
  }
  if (total > 0.0 && std::sqrt(outside / total) > alias_tol) {
    std::ostringstream msg;
    msg << "relative content " << std::sqrt(outside / total) << " beyond |xi| = " << band
        << " aliases on the target grid";
    throw AliasingError(msg.str());
  }
  const double amp = std::pow(sigma, 1.0 / kappa);
  Field out = zero_field(target);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const Vec3 x = position(target, i);
    std::array<std::size_t, 3> m{0, 0, 0};
    bool inside = true;
    for (int a = 0; a < target.d; ++a) {
      const double pos = (sigma * x[a] + src.L) / src.dx;
      const double r = std::round(pos);
      if (std::abs(pos - r) > 1e-9 * std::max(1.0, std::abs(pos))) {
        throw InvalidArgument("target lattice does not map onto the source lattice");
      }
      if (r < 0.0 || r >= static_cast<double>(src.n)) {
        inside = false;
        break;
      }
      m[a] = static_cast<std::size_t>(r);
    }
    if (inside) out.values[i] = amp * u.values[flatten(src, m)];
  }
  return out;
}

Field chirped_gaussian(const GridSpec& g, double amplitude, double beta) {
  return sample(g, Explicit{[=](const Vec3& x) {
                  const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                  return amplitude * std::exp(cplx(-0.5 * r2, -beta * r2));
                }});
}

double glassey_amplitude(double lambda, int kappa, double beta) {
  if (lambda == 0.0) throw InvalidArgument("glassey amplitude needs a nonzero coupling");
  // lambda/(kappa+1) A^(2k+2) sqrt(pi/(k+1)) = 2 A^2 (1 + 4 beta^2) sqrt(pi) / 2
  const double k1 = kappa + 1.0;
  return std::pow((1.0 + 4.0 * beta * beta) * std::pow(k1, 1.5) / std::abs(lambda),
                  1.0 / (2.0 * kappa));
}

GlasseyResult glassey_run(const Field& u0, const EvolutionConfig& cfg) {
  GlasseyResult res;
  res.initial_energy = energy(u0, cfg.lambda, cfg.kappa);
  res.initial_virial = virial_momentum(u0, false)[0];
  try {
    res.trajectory = evolve(u0, cfg);
  } catch (const BlowupDetected& e) {
    res.trajectory = e.partial();
    res.stopped = true;
    res.stop_reason = e.what();
    res.stop_time = e.last_time();
  }
  const auto& diag = res.trajectory.diagnostics;
  const double g0 = diag.front().grad_norm;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    res.growth = std::max(res.growth, diag[i].grad_norm / g0);
    if (i > 0 && diag[i].grad_norm <= diag[i - 1].grad_norm) res.monotone = false;
  }
  return res;
}

}  // namespace alphamod
