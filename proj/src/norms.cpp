#include "alphamod/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "alphamod/errors.hpp"
#include "alphamod/kernels.hpp"

namespace alphamod {

namespace {

double abs2(cplx z) { return z.real() * z.real() + z.imag() * z.imag(); }

// Stable ordering of pieces by <k>, ties kept in enumeration order.
std::vector<std::size_t> order_by_bracket(const std::vector<AlphaIndex>& pieces) {
  std::vector<std::size_t> order(pieces.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pieces[a].bracket < pieces[b].bracket;
  });
  return order;
}

ModulationNorm finish(std::vector<AlphaIndex> pieces, std::vector<double> contribution,
                      double C) {
  ModulationNorm out;
  out.C = C;
  const auto order = order_by_bracket(pieces);
  double run = 0.0;
  for (std::size_t i : order) {
    out.pieces.push_back(pieces[i]);
    out.contribution.push_back(contribution[i]);
    run += contribution[i];
    out.partial_sums.push_back(run);
    out.max_bracket = std::max(out.max_bracket, pieces[i].bracket);
  }
  out.value = run;
  return out;
}

// Sum of |f^|^2 over lattice points of the closed box c +- h on every axis.
double box_mass(const SpectralField& f, const Vec3& c, double h) {
  const GridSpec& g = f.grid;
  const long half = static_cast<long>(g.n / 2);
  std::array<long, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < g.d; ++a) {
    lo[a] = std::max(-half, static_cast<long>(std::ceil((c[a] - h) / g.dxi - 1e-12)));
    hi[a] = std::min(half - 1, static_cast<long>(std::floor((c[a] + h) / g.dxi + 1e-12)));
    if (lo[a] > hi[a]) return 0.0;
  }
  double s = 0.0;
  std::array<long, 3> q = lo;
  while (true) {
    std::array<std::size_t, 3> m{0, 0, 0};
    for (int a = 0; a < g.d; ++a) m[a] = wrap_index(q[a], g.n);
    s += abs2(f.coefficients[flatten(g, m)]);
    int a = g.d - 1;
    while (a >= 0 && q[a] == hi[a]) {
      q[a] = lo[a];
      --a;
    }
    if (a < 0) break;
    ++q[a];
  }
  return s * g.spectral_weight();
}

}  // namespace

ModulationNorm modulation_norm_detail(const SpectralField& f, double s, double alpha,
                                      ModulationVariant variant, double C) {
  if (!(C > 0.0)) C = calibrate_c(f.grid, alpha);
  if (variant == ModulationVariant::smooth) {
    return modulation_norm_detail(f, s, alpha_symbols(f.grid, alpha, C));
  }
  auto pieces = alpha_enumerate(f.grid, alpha, C);
  std::vector<double> contribution(pieces.size());
  const double w = s / (1.0 - alpha);
  const std::ptrdiff_t np = static_cast<std::ptrdiff_t>(pieces.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t p = 0; p < np; ++p) {
    const auto& idx = pieces[p];
    contribution[p] = std::pow(idx.bracket, w) * std::sqrt(box_mass(f, idx.center, idx.radius));
  }
  return finish(std::move(pieces), std::move(contribution), C);
}

ModulationNorm modulation_norm_detail(const SpectralField& f, double s,
                                      const DecompositionSymbols& symbols) {
  if (symbols.kind != DecompositionKind::alpha) {
    throw InvalidArgument("modulation norm needs alpha symbols");
  }
  if (!(f.grid == symbols.grid)) throw InvalidArgument("symbols built for a different grid");
  const double w = s / (1.0 - symbols.alpha);
  const double weight = f.grid.spectral_weight();
  std::vector<double> contribution(symbols.count());
  const std::ptrdiff_t np = static_cast<std::ptrdiff_t>(symbols.count());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t p = 0; p < np; ++p) {
    const auto& m = symbols.multipliers[p];
    double mass = 0.0;
    for (std::size_t e = 0; e < m.index.size(); ++e) {
      mass += m.value[e] * m.value[e] * abs2(f.coefficients[m.index[e]]);
    }
    contribution[p] =
        std::pow(symbols.alpha_indices[p].bracket, w) * std::sqrt(mass * weight);
  }
  return finish(symbols.alpha_indices, std::move(contribution), symbols.C);
}

double modulation_norm(const Field& f, double s, double alpha, ModulationVariant variant,
                       double C) {
  return modulation_norm_detail(to_spectral(f), s, alpha, variant, C).value;
}

BesovNorm besov_norm_detail(const SpectralField& f, double s, double q) {
  if (!(q >= 1.0)) throw InvalidArgument("besov q must be >= 1");
  const GridSpec& g = f.grid;
  const auto xi2 = frequency_norm2(g);
  double rmax = 0.0;
  for (double v : xi2) rmax = std::max(rmax, v);
  rmax = std::sqrt(rmax);
  int J = 0;
  while (std::ldexp(1.0, J) <= rmax) ++J;
  std::vector<double> mass(static_cast<std::size_t>(J) + 1, 0.0);
  for (std::size_t i = 0; i < xi2.size(); ++i) {
    const double r = std::sqrt(xi2[i]);
    int j = 0;
    if (r > 1.0) {
      j = 1;
      while (r >= std::ldexp(1.0, j)) ++j;
    }
    mass[j] += abs2(f.coefficients[i]);
  }
  BesovNorm out;
  double acc = 0.0;
  for (int j = 0; j <= J; ++j) {
    const double c = std::pow(2.0, j * s) * std::sqrt(mass[j] * g.spectral_weight());
    out.j.push_back(j);
    out.contribution.push_back(c);
    if (std::isinf(q)) {
      acc = std::max(acc, c);
    } else {
      acc += std::pow(c, q);
    }
  }
  out.value = std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
  return out;
}

double besov_norm(const Field& f, double s, double q) {
  return besov_norm_detail(to_spectral(f), s, q).value;
}

double sobolev_norm(const SpectralField& f, double s, bool homogeneous) {
  const auto xi2 = frequency_norm2(f.grid);
  double acc = 0.0;
  for (std::size_t i = 0; i < xi2.size(); ++i) {
    const double a2 = abs2(f.coefficients[i]);
    double w2;
    if (homogeneous) {
      if (xi2[i] == 0.0) {
        if (s < 0.0 && a2 > 0.0) {
          throw ZeroModeError("homogeneous Sobolev norm of negative order with a zero mode");
        }
        w2 = s == 0.0 ? 1.0 : 0.0;
      } else {
        w2 = std::pow(xi2[i], s);
      }
    } else {
      w2 = std::pow(1.0 + xi2[i], s);
    }
    acc += w2 * a2;
  }
  return std::sqrt(acc * f.grid.spectral_weight());
}

double sobolev_norm(const Field& f, double s, bool homogeneous) {
  return sobolev_norm(to_spectral(f), s, homogeneous);
}

double lp_norm(const Field& f, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("Lebesgue exponent must be >= 1");
  if (std::isinf(p)) return kernels::max_abs(f.values);
  if (p == 2.0) return l2_norm(f);
  return std::pow(kernels::sum_abs_pow(f.values, p) * f.grid.cell_volume(), 1.0 / p);
}

NormReport norm_report(const Field& f, const NormParams& params, std::string id) {
  NormReport r;
  r.id = std::move(id);
  r.params = params;
  const SpectralField fh = to_spectral(f);
  r.C_used = params.C > 0.0 ? params.C : calibrate_c(f.grid, params.alpha);
  const auto sharp =
      modulation_norm_detail(fh, params.s, params.alpha, ModulationVariant::sharp, r.C_used);
  const auto smooth =
      modulation_norm_detail(fh, params.s, params.alpha, ModulationVariant::smooth, r.C_used);
  r.modulation_sharp = sharp.value;
  r.modulation_smooth = smooth.value;
  r.modulation_partial_sums = smooth.partial_sums;
  r.max_bracket = smooth.max_bracket;
  const auto besov = besov_norm_detail(fh, params.s, params.q);
  r.besov = besov.value;
  r.besov_contributions = besov.contribution;
  r.max_j = besov.j.empty() ? 0 : besov.j.back();
  r.sobolev = sobolev_norm(fh, params.s, false);
  try {
    r.sobolev_homogeneous = sobolev_norm(fh, params.s, true);
  } catch (const ZeroModeError&) {
    r.sobolev_homogeneous = std::numeric_limits<double>::quiet_NaN();
  }
  r.l2 = l2_norm(f);
  r.lp = lp_norm(f, params.p);
  r.linf = lp_norm(f, std::numeric_limits<double>::infinity());
  return r;
}

double p_variation(const std::vector<std::vector<double>>& distance, double p) {
  const std::size_t n = distance.size();
  if (n < 2) throw InvalidArgument("p-variation needs at least two samples");
  if (!(p >= 1.0)) throw InvalidArgument("p-variation exponent must be >= 1");
  // best[i]: largest sum of p-th powers over chains 0 = t_0 < ... < t_m = i.
  // Inserting a breakpoint never lowers the sum, so chains may be assumed to
  // start at the first sample and end at the last.
  std::vector<double> best(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    double b = -1.0;
    for (std::size_t j = 0; j < i; ++j) b = std::max(b, best[j] + std::pow(distance[j][i], p));
    best[i] = b;
  }
  return std::pow(best[n - 1], 1.0 / p);
}

double p_variation(const std::vector<Snapshot>& series, double p) {
  const std::size_t n = series.size();
  if (n < 2) throw InvalidArgument("p-variation needs at least two samples");
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      Field diff = series[j].field;
      for (std::size_t e = 0; e < diff.values.size(); ++e) diff.values[e] -= series[i].field.values[e];
      dist[i][j] = dist[j][i] = l2_norm(diff);
    }
  }
  return p_variation(dist, p);
}

double p_variation(const std::vector<double>& scalar_series, double p) {
  const std::size_t n = scalar_series.size();
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) dist[i][j] = std::abs(scalar_series[j] - scalar_series[i]);
  }
  return p_variation(dist, p);
}

EmbeddingReport embedding_report(const std::vector<Field>& corpus, double s1, double s2,
                                 double alpha, double C) {
  EmbeddingReport r;
  r.s1 = s1;
  r.s2 = s2;
  r.alpha = alpha;
  if (corpus.empty()) return r;
  if (!(C > 0.0)) C = calibrate_c(corpus.front().grid, alpha);
  const auto symbols = alpha_symbols(corpus.front().grid, alpha, C);
  for (const auto& f : corpus) {
    const SpectralField fh = to_spectral(f);
    const double m1 = modulation_norm_detail(fh, s1, symbols).value;
    const double m2 = modulation_norm_detail(fh, s2, symbols).value;
    const double b1 = besov_norm_detail(fh, s1, 1.0).value;
    const double b2 = besov_norm_detail(fh, s2, 1.0).value;
    r.ratio_besov_over_modulation.push_back(b2 / m1);
    r.ratio_modulation_over_besov.push_back(m2 / b1);
  }
  r.max_besov_over_modulation =
      *std::max_element(r.ratio_besov_over_modulation.begin(), r.ratio_besov_over_modulation.end());
  r.max_modulation_over_besov =
      *std::max_element(r.ratio_modulation_over_besov.begin(), r.ratio_modulation_over_besov.end());
  return r;
}

}  // namespace alphamod
