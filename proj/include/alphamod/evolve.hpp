#pragma once

// Free propagation, split-step integration and Duhamel/Picard machinery for
//
//   i u_t + Delta u + lambda |u|^(2 kappa) u = 0,
//
// lambda > 0 focusing. On the spectral side S(t) multiplies by
// exp(-i t |xi|^2). The conserved energy is
//
//   E(u) = ||grad u||_2^2 - lambda / (kappa + 1) ||u||_{2 kappa + 2}^{2 kappa + 2}.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "alphamod/errors.hpp"
#include "alphamod/grid.hpp"

namespace alphamod {

struct EvolutionConfig {
  double lambda = 0.0;
  int kappa = 1;
  double dt = 1e-3;
  double t_end = 0.0;
  bool dealias = false;
  /// Record a snapshot and a diagnostics row every `snapshot_stride` steps.
  std::size_t snapshot_stride = 1;
  /// When positive, each step is shortened so that
  /// |lambda| max|u|^(2 kappa) dt stays below this value.
  double max_phase_per_step = 0.0;
};

void validate(const EvolutionConfig& cfg);

struct Diagnostics {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double grad_norm = 0.0;
  Vec3 virial{0.0, 0.0, 0.0};
};

struct Trajectory {
  EvolutionConfig config;
  std::vector<Snapshot> snapshots;
  std::vector<Diagnostics> diagnostics;
};

/// Raised when the solution leaves the finite range or exhausts the grid
/// resolution (||grad u|| > xi_max ||u|| / 2).
class BlowupDetected : public Error {
 public:
  BlowupDetected(const std::string& what, double last_time, Trajectory partial)
      : Error(what), last_time_(last_time), partial_(std::move(partial)) {}
  double last_time() const { return last_time_; }
  const Trajectory& partial() const { return partial_; }

 private:
  double last_time_;
  Trajectory partial_;
};

/// Boundary amplitude too large for x-weighted quadrature.
class BoundaryWarning : public Error {
 public:
  using Error::Error;
};

SpectralField free_propagate(const SpectralField& f, double t);
Field free_propagate(const Field& f, double t);

Field nonlinear_phase_step(const Field& u, double dt, double lambda, int kappa);

/// One half-linear / nonlinear / half-linear step of length cfg.dt.
Field strang_step(const Field& u, const EvolutionConfig& cfg);

Trajectory evolve(const Field& u0, const EvolutionConfig& cfg);

double mass(const Field& u);
double grad_norm(const Field& u);
double energy(const Field& u, double lambda, int kappa);

/// Im int x_a conj(u) d_a u dx per axis. With `strict`, throws
/// BoundaryWarning when the boundary amplitude exceeds 1e-6 of the peak.
Vec3 virial_momentum(const Field& u, bool strict = true);

Diagnostics diagnose(const Field& u, double t, double lambda, int kappa);

struct DuhamelOptions {
  std::size_t initial_nodes = 32;
  std::size_t max_nodes = 4096;
  double tol = 1e-10;
};

struct DuhamelResult {
  SpectralField value;
  std::size_t nodes = 0;
  double last_change = 0.0;
};

/// A(f)(t) = int_0^t S(t - tau) f(tau) dtau by Gauss-Legendre quadrature,
/// doubling the node count until successive values agree to `tol`.
DuhamelResult duhamel(const std::function<SpectralField(double)>& forcing, double t,
                      const DuhamelOptions& opts = {});
Field duhamel(const std::function<Field(double)>& forcing, double t,
              const DuhamelOptions& opts = {});

struct PicardOptions {
  double s = 0.0;
  double alpha = 0.0;
  /// Covering constant for the smooth modulation norm; <= 0 calibrates.
  double C = 0.0;
  std::size_t max_iter = 20;
  double tol = 1e-12;
  std::size_t panels = 16;
  std::size_t nodes_per_panel = 8;
  /// Recorded against the data norm; not enforced.
  double small_data_threshold = 1e-2;
};

struct PicardResult {
  /// Solution at t = 0, the quadrature nodes and t_end.
  Trajectory trajectory;
  /// sup over nodes of ||D_{n+1} - D_n||_{M^{s,alpha}_{2,1}} per iteration.
  std::vector<double> differences;
  std::vector<double> ratios;
  std::size_t iterations = 0;
  bool converged = false;
  double data_norm = 0.0;
  bool small_data = false;
};

/// Iterates u_{n+1} = S(t) u0 + i A(lambda |u_n|^(2 kappa) u_n) on [0, t_end].
/// Throws ContractionFailure carrying the ratio history when the iteration
/// diverges or fails to settle within max_iter.
PicardResult picard_solve(const Field& u0, const EvolutionConfig& cfg, const PicardOptions& opts);

/// sigma^(1/kappa) u(sigma x), relabelled onto the grid of half length L / sigma.
Field scaling_transform(const Field& u, double sigma, int kappa);

/// sigma^(1/kappa) u(sigma x) sampled on `target`. Target points whose image
/// falls outside the source box are zero. Throws AliasingError when the
/// relative L2 mass of u beyond xi_max(target) / sigma exceeds alias_tol.
Field scaling_transform(const Field& u, double sigma, int kappa, const GridSpec& target,
                        double alias_tol = 1e-10);

struct GlasseyResult {
  Trajectory trajectory;
  bool stopped = false;
  std::string stop_reason;
  double stop_time = 0.0;
  double initial_energy = 0.0;
  double initial_virial = 0.0;
  /// max over recorded rows of ||grad u|| / ||grad u0||.
  double growth = 0.0;
  bool monotone = true;
};

/// Chirped Gaussian A exp(-(1/2 + i beta) x^2) in d = 1.
Field chirped_gaussian(const GridSpec& g, double amplitude, double beta);

/// Amplitude making the potential term twice the kinetic term, so E < 0.
double glassey_amplitude(double lambda, int kappa, double beta);

GlasseyResult glassey_run(const Field& u0, const EvolutionConfig& cfg);

}  // namespace alphamod
