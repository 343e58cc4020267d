#pragma once

// Supercritical initial data built from alpha-adapted bumps along a sparse
// lattice, and the two-bump data whose third-order Taylor coefficient
// inflates the alpha-modulation norm.

#include <cstddef>
#include <string>
#include <vector>

#include "alphamod/grid.hpp"
#include "alphamod/report.hpp"

namespace alphamod {

/// alpha / (1 - alpha), the exponent of <k> in piece centers and radii.
double center_power(double alpha);

/// Smallest k >= 1 with <k>^(alpha/(1-alpha)) k in [2^(j+1/4), 2^(j+1/2)).
/// Throws WindowEmpty when no integer lands in the window.
long choose_kj(double alpha, long j);

struct SupercriticalDataSpec {
  double eps = 1e-2;
  double alpha = 0.5;
  int kappa = 3;
  int d = 1;
  double s = 0.12;
  /// Lattice spacing: pieces for j in {J, 2J, 3J, ...}.
  long J = 1;
  /// Upper bound on the number of pieces; 0 keeps every piece in the band.
  std::size_t max_pieces = 0;
  double c = 0.125;
};

/// s_kappa < s < s(kappa) and kappa > 2/d; throws InvalidArgument.
void validate(const SupercriticalDataSpec& spec);

struct Piece {
  long j = 0;
  long k = 0;
  double bracket = 0.0;
  double center = 0.0;
  double width = 0.0;
  double amplitude = 0.0;
};

struct SupercriticalData {
  Field u0;
  std::vector<Piece> pieces;
  /// Windows with no integer solution.
  std::size_t empty_windows = 0;
  /// Pieces with k < 3, where ln^2 k < 1, left out.
  std::size_t skipped_small = 0;
  /// True when the band, not max_pieces, ended the sum.
  bool truncated_by_band = false;
};

/// u0^ = eps sum_j ln^-2(k_j) <k_j>^(-(s + d alpha/2)/(1 - alpha)) phi((xi - c_j) / (c <k_j>^(alpha/(1-alpha))))
/// with c_j = <k_j>^(alpha/(1-alpha)) (k_j, 0, ..., 0).
SupercriticalData build_supercritical_u0(const SupercriticalDataSpec& spec, const GridSpec& g);

/// sigma^(1/kappa) u0(sigma x) on the relabelled grid; sigma a power of two.
Field scaled_data(const SupercriticalDataSpec& spec, double sigma, const GridSpec& g);

struct NormClaimOptions {
  std::vector<double> sigmas{16.0, 32.0, 64.0, 128.0, 256.0};
  /// Point counts for the grid-maximum refinement at fixed L.
  std::vector<std::size_t> refinements{8192, 16384, 32768, 65536, 131072};
  /// Smooth alpha-modulation covering constant; <= 0 calibrates.
  double C = 0.0;
  double slope_tolerance = 0.1;
  double besov_tolerance = 0.1;
};

struct NormClaimReport {
  /// ||v(0)||_2 against sigma; target exponent 1/kappa - d/2.
  ExperimentReport l2_scaling;
  /// ||v(0)||_{M^{s,alpha}_{2,1}} against sigma; passes above (1-alpha)/kappa - tol.
  ExperimentReport modulation_scaling;
  /// Per-piece B^{s(kappa)}_{2,inf} contribution times ln^2 k against <k>;
  /// target (s(kappa) - s)/(1 - alpha). Also the truncated partial sups.
  ExperimentReport besov_growth;
  /// max |u0| against grid refinement (pieces entering the band).
  ExperimentReport grid_max;
};

/// Runs all four checks for data built on `g` (refinements keep g.L).
NormClaimReport norm_claim_report(const SupercriticalData& data, const SupercriticalDataSpec& spec,
                                  const NormClaimOptions& opts = {});

struct IllposedDataSpec {
  long N = 8;
  double s = -0.1;
  double alpha = 0.0;
  int kappa = 1;
  int d = 1;
  double delta = 1.0;
  double c = 0.125;
};

void validate(const IllposedDataSpec& spec);

/// Grid with at least `points_per_width` lattice points across a bump radius
/// whose band holds the degree 2 kappa + 1 product of the data without
/// aliasing, and whose box keeps the two packets from meeting again across
/// the periodic boundary before the inflation time.
GridSpec illposed_grid(const IllposedDataSpec& spec, std::size_t points_per_width = 8);

/// delta <k>^(-(s + d alpha/2)/(1-alpha)) (phi_k + phi_-k), k = (N, ..., N).
Field build_illposed_v0(const IllposedDataSpec& spec, const GridSpec& g);

/// Time <k>^(-2 alpha/(1-alpha)) at which the inflation is read off.
double inflation_time(const IllposedDataSpec& spec);

/// int_0^t S(t - tau) |S(tau) v0|^(2 kappa) S(tau) v0 dtau by Gauss-Legendre
/// quadrature. Throws AliasingError when the product leaves the band.
SpectralField taylor_coefficient(const Field& v0, double t, int kappa);
SpectralField taylor_coefficient(const Field& v0, double t);

/// Same quantity for kappa = 1 as an exact lattice sum over the support of
/// v0^: e^{-it|xi|^2} sum v^(x1) v^(x2) conj(v^(x3)) (e^{itP} - 1)/(iP)
/// with x3 = x1 + x2 - xi and P = |xi|^2 - |x1|^2 - |x2|^2 + |x3|^2.
SpectralField taylor_coefficient_resonant(const Field& v0, double t);

enum class TaylorMethod { resonant, quadrature };

struct InflationOptions {
  double s = -0.1;
  double alpha = 0.0;
  int kappa = 1;
  int d = 1;
  std::vector<long> N{8, 16, 32, 64, 128};
  std::size_t points_per_width = 8;
  TaylorMethod method = TaylorMethod::resonant;
  double C = 0.0;
  double tolerance = 0.1;
};

/// [2 kappa (d alpha/2 - s) - 2 alpha] / (1 - alpha).
double inflation_exponent(double s, double alpha, int kappa, int d);

/// Columns: N, bracket, t, n, data_norm, taylor_norm. Fits log taylor_norm
/// against log <k>. Above the threshold s_kappa the run is a control and
/// passes when the slope is non-positive.
ExperimentReport inflation_sweep(const InflationOptions& opts);

}  // namespace alphamod
