#pragma once

// Frequency decompositions sampled on the grid lattice.
//
// Dyadic pieces: phi_0 = phi, phi_j = phi(./2^j) - phi(./2^(j-1)).
// Alpha pieces: phi_k = phi((xi - c_k) / r_k) with c_k = <k>^a k,
// r_k = C <k>^a, a = alpha / (1 - alpha), <k> = (1 + |k|^2)^(1/2), and
// eta_k = phi_k / sum_l phi_l.

#include <array>
#include <cstddef>
#include <vector>

#include "alphamod/bump.hpp"
#include "alphamod/grid.hpp"

namespace alphamod {

using LatticeIndex = std::array<long, 3>;

struct BumpProfile {
  double operator()(double radius) const { return bump_radial(radius); }
  double operator()(const Vec3& xi, int d) const;
};

BumpProfile make_bump();

/// <k> = (1 + |k|^2)^(1/2) over the first d components.
double bracket(const LatticeIndex& k, int d);

/// alpha / (1 - alpha).
double alpha_power(double alpha);

struct AlphaIndex {
  LatticeIndex k{0, 0, 0};
  double bracket = 1.0;
  Vec3 center{0.0, 0.0, 0.0};
  double radius = 0.0;
};

AlphaIndex make_alpha_index(const LatticeIndex& k, int d, double alpha, double C);

enum class DecompositionKind { dyadic, alpha };

/// Nonzero entries of one multiplier, by flat spectral position.
struct SparseMultiplier {
  std::vector<std::size_t> index;
  std::vector<double> value;
};

struct DecompositionSymbols {
  DecompositionKind kind = DecompositionKind::dyadic;
  GridSpec grid;
  double alpha = 0.0;
  double C = 0.0;
  std::vector<int> dyadic_j;
  std::vector<AlphaIndex> alpha_indices;
  std::vector<SparseMultiplier> multipliers;
  /// Minimum over the lattice of the unnormalised sum of pieces.
  double coverage_floor = 0.0;

  std::size_t count() const { return multipliers.size(); }
};

DecompositionSymbols dyadic_symbols(const GridSpec& g);

/// Throws CoverageError when some lattice point carries zero total weight.
DecompositionSymbols alpha_symbols(const GridSpec& g, double alpha, double C);

/// Every k whose support ball of radius 2 r_k meets the lattice box.
std::vector<AlphaIndex> alpha_enumerate(const GridSpec& g, double alpha, double C);

/// Minimum of sum_k phi_k over the lattice, and in 1D additionally over
/// `scan_points` equispaced points of [-xi_max, xi_max].
double alpha_coverage_floor(const GridSpec& g, double alpha, double C,
                            std::size_t scan_points = 10000);

/// Smallest C in {1, 1.25, 1.5, ...} with coverage floor >= 0.5.
double calibrate_c(const GridSpec& g, double alpha);

SpectralField apply_projector(const SpectralField& f, const DecompositionSymbols& symbols,
                              std::size_t index);

/// max over covered lattice points of |sum of multipliers - 1|.
double partition_residual(const DecompositionSymbols& symbols);

}  // namespace alphamod
