#pragma once

// Numerical checks of the Strichartz exponent law for alpha-adapted data and
// of the bilinear decay lambda^(-1/2) for frequency-separated free waves.

#include <cstddef>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "alphamod/evolve.hpp"
#include "alphamod/grid.hpp"
#include "alphamod/report.hpp"

namespace alphamod {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// q, r >= 2, (q, r, d) != (2, inf, 2) and 1/2 - 1/r - 2/(dq) >= 0.
bool check_admissible(double q, double r, int d);

/// d alpha / (1 - alpha) (1/2 - 1/r - 2/(dq)).
double strichartz_exponent(double alpha, double q, double r, int d);

struct SpaceTimeOptions {
  /// When positive, nodes are graded as t = time_scale sinh(u) with u uniform.
  double time_scale = 0.0;
  std::size_t initial_intervals = 64;
  double rel_tol = 5e-3;
  std::size_t max_doublings = 6;
};

struct SpaceTimeResult {
  double value = 0.0;
  std::size_t nodes = 0;
  double last_change = 0.0;
};

/// || S(t) u0 ||_{L^q_t([-T, T]) L^r_x} by composite Simpson in time (the
/// supremum over the sampled times when q = inf), doubling the node count
/// until successive values agree to rel_tol. Throws NonConvergence.
SpaceTimeResult space_time_norm(const Field& u0, double q, double r, double T,
                                const SpaceTimeOptions& opts = {});

/// Same norm over the recorded snapshot times of a trajectory (trapezoid rule).
double space_time_norm(const Trajectory& traj, double q, double r);

struct StrichartzOptions {
  GridSpec grid;
  double alpha = 0.5;
  double q = 4.0;
  double r = kInf;
  std::vector<long> k{1, 2, 4, 8, 16};
  /// Bump radius as a fraction of the piece radius C <k>^(alpha/(1-alpha)).
  double width_fraction = 0.25;
  double C = 1.0;
  /// Window half length in dispersive units: T_k = T0 / w_k^2.
  double T0 = 20.0;
  double tolerance = 0.15;
  SpaceTimeOptions time;
};

/// Columns: k, bracket, center, width, T, nodes, measured, data_norm,
/// predicted, ratio. The fit is log(measured / data_norm) against log <k>.
ExperimentReport strichartz_sweep(const StrichartzOptions& opts);

enum class Conjugation { uv, conj_u_v, u_conj_v, conj_u_conj_v };

/// The two factors are S(t) phi_i, conjugated after evolution as the pattern
/// says; the bumps describe phi_i before conjugation.
struct BilinearExperiment {
  FourierBump first;
  FourierBump second;
  int axis = 0;
  Conjugation pattern = Conjugation::uv;
  /// Initial window half length; <= 0 picks 1 / (r_min lambda_sep).
  double T = 0.0;
};

struct BilinearOptions {
  std::size_t initial_intervals = 64;
  double rel_tol = 1e-9;
  std::size_t max_refinements = 10;
  /// Accept the window once doubling T changes the value by less than this.
  double tail_tol = 1e-2;
  std::size_t max_tail_doublings = 4;
};

struct BilinearResult {
  double value = 0.0;
  double T = 0.0;
  double separation = 0.0;
  double transverse = 0.0;
  double predicted = 0.0;
  std::size_t nodes = 0;
};

/// inf |xi_axis - eta_axis| over the two supports (radius 2 w balls).
double bilinear_separation(const BilinearExperiment& e);

/// Measure of the support projected onto the hyperplane orthogonal to the
/// axis; 1 in d = 1.
double transverse_measure(const FourierBump& b, int d);

/// || u v ||_{L^2([-T, T] x box)} with the window grown until the tail test
/// passes. Throws InvalidArgument for overlapping supports or packets that
/// would wrap around the box, NonConvergence when the tail test fails.
BilinearResult bilinear_measure(const GridSpec& g, const BilinearExperiment& e,
                                const BilinearOptions& opts = {});

struct BilinearSweepOptions {
  GridSpec grid;
  /// Second bump is placed along the axis at separation lambda from the first.
  FourierBump first;
  FourierBump second;
  int axis = 0;
  Conjugation pattern = Conjugation::uv;
  std::vector<double> separations{8.0, 16.0, 32.0, 64.0, 128.0};
  double tolerance = 0.1;
  BilinearOptions measure;
};

/// The pair is centred symmetrically about 0 at each separation. Columns:
/// separation, T, nodes, measured, predicted, oracle (NaN unless d = 1).
ExperimentReport bilinear_sweep(const BilinearSweepOptions& opts);

/// Whole-line, all-time || S(t) phi1 S(t) phi2 ||_{L^2(R x R)} from
///
///   (2 pi)^-2 int int |phi1^(x)|^2 |phi2^(y)|^2 / (2 |x - y|) dx dy,
///
/// the same for every conjugation pattern. Supports are given as intervals.
double bilinear_oracle_1d(const std::function<double(double)>& abs_phi1,
                          std::pair<double, double> support1,
                          const std::function<double(double)>& abs_phi2,
                          std::pair<double, double> support2, std::size_t panels = 64);
double bilinear_oracle_1d(const FourierBump& first, const FourierBump& second,
                          std::size_t panels = 64);

}  // namespace alphamod
