#include "alphamod/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "alphamod/errors.hpp"

namespace alphamod {

namespace {

// Visits every lattice point (signed indices) inside the axis box of the
// ball |xi - c| < radius, clipped to [-n/2, n/2).
template <class Fn>
void for_each_in_ball(const GridSpec& g, const Vec3& c, double radius, Fn&& fn) {
  const long half = static_cast<long>(g.n / 2);
  std::array<long, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < g.d; ++a) {
    lo[a] = std::max(-half, static_cast<long>(std::ceil((c[a] - radius) / g.dxi)));
    hi[a] = std::min(half - 1, static_cast<long>(std::floor((c[a] + radius) / g.dxi)));
    if (lo[a] > hi[a]) return;
  }
  std::array<long, 3> q = lo;
  while (true) {
    Vec3 xi{0.0, 0.0, 0.0};
    std::array<std::size_t, 3> m{0, 0, 0};
    for (int a = 0; a < g.d; ++a) {
      xi[a] = static_cast<double>(q[a]) * g.dxi;
      m[a] = wrap_index(q[a], g.n);
    }
    fn(flatten(g, m), xi);
    int a = g.d - 1;
    while (a >= 0 && q[a] == hi[a]) {
      q[a] = lo[a];
      --a;
    }
    if (a < 0) break;
    ++q[a];
  }
}

double distance(const Vec3& a, const Vec3& b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double piece_value(const AlphaIndex& idx, const Vec3& xi, int d) {
  return bump_radial(distance(xi, idx.center, d) / idx.radius);
}

// Unnormalised pieces and their pointwise sum on the lattice.
struct RawAlpha {
  std::vector<AlphaIndex> indices;
  std::vector<SparseMultiplier> pieces;
  std::vector<double> total;
};

RawAlpha raw_alpha(const GridSpec& g, double alpha, double C) {
  RawAlpha raw;
  raw.indices = alpha_enumerate(g, alpha, C);
  raw.total.assign(g.size(), 0.0);
  raw.pieces.resize(raw.indices.size());
  for (std::size_t p = 0; p < raw.indices.size(); ++p) {
    const AlphaIndex& idx = raw.indices[p];
    auto& piece = raw.pieces[p];
    for_each_in_ball(g, idx.center, 2.0 * idx.radius, [&](std::size_t flat, const Vec3& xi) {
      const double v = piece_value(idx, xi, g.d);
      if (v > 0.0) {
        piece.index.push_back(flat);
        piece.value.push_back(v);
        raw.total[flat] += v;
      }
    });
  }
  return raw;
}

}  // namespace

double BumpProfile::operator()(const Vec3& xi, int d) const {
  double s = 0.0;
  for (int a = 0; a < d; ++a) s += xi[a] * xi[a];
  return bump_radial(std::sqrt(s));
}

BumpProfile make_bump() { return BumpProfile{}; }

double bracket(const LatticeIndex& k, int d) {
  double s = 1.0;
  for (int a = 0; a < d; ++a) s += static_cast<double>(k[a]) * static_cast<double>(k[a]);
  return std::sqrt(s);
}

double alpha_power(double alpha) { return alpha / (1.0 - alpha); }

AlphaIndex make_alpha_index(const LatticeIndex& k, int d, double alpha, double C) {
  AlphaIndex idx;
  idx.k = k;
  idx.bracket = bracket(k, d);
  const double scale = std::pow(idx.bracket, alpha_power(alpha));
  for (int a = 0; a < d; ++a) idx.center[a] = scale * static_cast<double>(k[a]);
  idx.radius = C * scale;
  return idx;
}

std::vector<AlphaIndex> alpha_enumerate(const GridSpec& g, double alpha, double C) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in [0, 1)");
  if (!(C > 0.0)) throw InvalidArgument("covering constant C must be positive");
  const double lo = -g.xi_max;
  const double hi = g.xi_max - g.dxi;
  const long K = static_cast<long>(std::floor(g.xi_max + 2.0 * C)) + 1;
  std::vector<AlphaIndex> out;
  LatticeIndex k{0, 0, 0};
  for (int a = 0; a < g.d; ++a) k[a] = -K;
  while (true) {
    const AlphaIndex idx = make_alpha_index(k, g.d, alpha, C);
    double dist2 = 0.0;
    for (int a = 0; a < g.d; ++a) {
      const double c = idx.center[a];
      const double gap = c < lo ? lo - c : (c > hi ? c - hi : 0.0);
      dist2 += gap * gap;
    }
    if (dist2 < 4.0 * idx.radius * idx.radius) out.push_back(idx);
    int a = g.d - 1;
    while (a >= 0 && k[a] == K) {
      k[a] = -K;
      --a;
    }
    if (a < 0) break;
    ++k[a];
  }
  return out;
}

double alpha_coverage_floor(const GridSpec& g, double alpha, double C, std::size_t scan_points) {
  const RawAlpha raw = raw_alpha(g, alpha, C);
  double floor = *std::min_element(raw.total.begin(), raw.total.end());
  if (g.d == 1 && scan_points > 1) {
    for (std::size_t i = 0; i < scan_points; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(scan_points - 1);
      const Vec3 xi{-g.xi_max + 2.0 * g.xi_max * t, 0.0, 0.0};
      double s = 0.0;
      for (const auto& idx : raw.indices) s += piece_value(idx, xi, 1);
      floor = std::min(floor, s);
    }
  }
  return floor;
}

double calibrate_c(const GridSpec& g, double alpha) {
  for (int step = 0; step <= 76; ++step) {
    const double C = 1.0 + 0.25 * step;
    if (alpha_coverage_floor(g, alpha, C) >= 0.5) return C;
  }
  throw NonConvergence("no covering constant up to 20 reaches coverage floor 0.5");
}

DecompositionSymbols dyadic_symbols(const GridSpec& g) {
  DecompositionSymbols sym;
  sym.kind = DecompositionKind::dyadic;
  sym.grid = g;
  int J = 0;
  const double reach = std::sqrt(static_cast<double>(g.d)) * g.xi_max;
  while (std::ldexp(1.0, J) < reach) ++J;
  const auto xi2 = frequency_norm2(g);
  sym.multipliers.resize(static_cast<std::size_t>(J) + 1);
  for (int j = 0; j <= J; ++j) sym.dyadic_j.push_back(j);
  for (std::size_t i = 0; i < xi2.size(); ++i) {
    const double r = std::sqrt(xi2[i]);
    double prev = 0.0;
    for (int j = 0; j <= J; ++j) {
      const double cur = bump_radial(r / std::ldexp(1.0, j));
      const double v = cur - prev;
      prev = cur;
      if (v > 0.0) {
        sym.multipliers[j].index.push_back(i);
        sym.multipliers[j].value.push_back(v);
      }
    }
  }
  sym.coverage_floor = 1.0;
  return sym;
}

DecompositionSymbols alpha_symbols(const GridSpec& g, double alpha, double C) {
  RawAlpha raw = raw_alpha(g, alpha, C);
  DecompositionSymbols sym;
  sym.kind = DecompositionKind::alpha;
  sym.grid = g;
  sym.alpha = alpha;
  sym.C = C;
  sym.coverage_floor = *std::min_element(raw.total.begin(), raw.total.end());
  if (!(sym.coverage_floor > 0.0)) {
    std::vector<double> uncovered;
    for (std::size_t i = 0; i < raw.total.size() && uncovered.size() < 16 * 3; ++i) {
      if (raw.total[i] > 0.0) continue;
      const Vec3 xi = frequency(g, i);
      uncovered.insert(uncovered.end(), xi.begin(), xi.begin() + g.d);
    }
    double suggested = C;
    try {
      suggested = std::max(C + 0.25, calibrate_c(g, alpha));
    } catch (const NonConvergence&) {
      suggested = 2.0 * C;
    }
    std::ostringstream msg;
    msg << "alpha covering with C = " << C << " leaves lattice points uncovered; try C = "
        << suggested;
    throw CoverageError(msg.str(), std::move(uncovered), suggested);
  }
  for (auto& piece : raw.pieces) {
    for (std::size_t e = 0; e < piece.index.size(); ++e) piece.value[e] /= raw.total[piece.index[e]];
  }
  sym.alpha_indices = std::move(raw.indices);
  sym.multipliers = std::move(raw.pieces);
  return sym;
}

SpectralField apply_projector(const SpectralField& f, const DecompositionSymbols& symbols,
                              std::size_t index) {
  if (index >= symbols.count()) throw InvalidArgument("projector index out of range");
  if (!(f.grid == symbols.grid)) throw InvalidArgument("symbols built for a different grid");
  SpectralField out = zero_spectrum(f.grid);
  const auto& m = symbols.multipliers[index];
  for (std::size_t e = 0; e < m.index.size(); ++e) {
    out.coefficients[m.index[e]] = m.value[e] * f.coefficients[m.index[e]];
  }
  return out;
}

double partition_residual(const DecompositionSymbols& symbols) {
  std::vector<double> total(symbols.grid.size(), 0.0);
  for (const auto& m : symbols.multipliers) {
    for (std::size_t e = 0; e < m.index.size(); ++e) total[m.index[e]] += m.value[e];
  }
  double worst = 0.0;
  for (double t : total) {
    if (t > 0.0) worst = std::max(worst, std::abs(t - 1.0));
  }
  return worst;
}

}  // namespace alphamod
