#pragma once

// Space norms evaluated on the grid. Spectral L2 masses use the Plancherel
// measure (dxi / 2 pi)^d, so they equal physical L2 masses.

#include <string>
#include <vector>

#include "alphamod/decomp.hpp"
#include "alphamod/grid.hpp"

namespace alphamod {

enum class ModulationVariant { sharp, smooth };

/// Per-piece breakdown of an alpha-modulation norm, ordered by <k>.
struct ModulationNorm {
  double value = 0.0;
  double C = 0.0;
  std::vector<AlphaIndex> pieces;
  std::vector<double> contribution;
  /// Running sums of `contribution` in the stored order.
  std::vector<double> partial_sums;
  /// Largest <k> represented on the grid.
  double max_bracket = 0.0;
};

/// sum_k <k>^(s/(1-alpha)) ||f^||_{L2(Q_k)} for the sharp variant with boxes
/// Q_k = c_k + [-r_k, r_k]^d (overlaps counted with multiplicity), and
/// sum_k <k>^(s/(1-alpha)) ||eta_k f^||_2 for the smooth one. C <= 0 selects
/// the calibrated constant.
ModulationNorm modulation_norm_detail(const SpectralField& f, double s, double alpha,
                                      ModulationVariant variant, double C = 0.0);

/// Smooth variant with prebuilt symbols.
ModulationNorm modulation_norm_detail(const SpectralField& f, double s,
                                      const DecompositionSymbols& symbols);

double modulation_norm(const Field& f, double s, double alpha, ModulationVariant variant,
                       double C = 0.0);

struct BesovNorm {
  double value = 0.0;
  std::vector<int> j;
  /// 2^(js) ||f^||_{L2(R_j)}.
  std::vector<double> contribution;
};

/// Sharp annuli R_0 = {|xi| <= 1}, R_j = {2^(j-1) <= |xi| < 2^j}. q may be
/// +infinity.
BesovNorm besov_norm_detail(const SpectralField& f, double s, double q);
double besov_norm(const Field& f, double s, double q);

/// Weight (1 + |xi|^2)^(s/2), or |xi|^s when homogeneous. Throws ZeroModeError
/// for a homogeneous norm with s < 0 on data with a nonzero zero mode.
double sobolev_norm(const SpectralField& f, double s, bool homogeneous);
double sobolev_norm(const Field& f, double s, bool homogeneous);

/// Grid quadrature; p may be +infinity (grid maximum).
double lp_norm(const Field& f, double p);

struct NormParams {
  double s = 0.0;
  double alpha = 0.0;
  double q = 1.0;
  double p = 2.0;
  double C = 0.0;
};

struct NormReport {
  std::string id;
  NormParams params;
  double C_used = 0.0;
  double modulation_sharp = 0.0;
  double modulation_smooth = 0.0;
  double besov = 0.0;
  double sobolev = 0.0;
  /// NaN when undefined (zero mode with s < 0).
  double sobolev_homogeneous = 0.0;
  double l2 = 0.0;
  double lp = 0.0;
  double linf = 0.0;
  double max_bracket = 0.0;
  int max_j = 0;
  std::vector<double> modulation_partial_sums;
  std::vector<double> besov_contributions;
};

NormReport norm_report(const Field& f, const NormParams& params, std::string id = "field");

/// Supremum over partitions with breakpoints among the sample indices of
/// (sum d(t_{i-1}, t_i)^p)^(1/p), given the pairwise distance matrix.
double p_variation(const std::vector<std::vector<double>>& distance, double p);
double p_variation(const std::vector<Snapshot>& series, double p);
double p_variation(const std::vector<double>& scalar_series, double p);

struct EmbeddingReport {
  double s1 = 0.0;
  double s2 = 0.0;
  double alpha = 0.0;
  /// ||f||_{B^{s2}_{2,1}} / ||f||_{M^{s1,alpha}_{2,1}} per corpus member.
  std::vector<double> ratio_besov_over_modulation;
  /// ||f||_{M^{s2,alpha}_{2,1}} / ||f||_{B^{s1}_{2,1}} per corpus member.
  std::vector<double> ratio_modulation_over_besov;
  double max_besov_over_modulation = 0.0;
  double max_modulation_over_besov = 0.0;
};

EmbeddingReport embedding_report(const std::vector<Field>& corpus, double s1, double s2,
                                 double alpha, double C = 0.0);

}  // namespace alphamod
