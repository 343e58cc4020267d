#pragma once

// Periodic sampling grid on [-L, L)^d and the transform pair.
//
// Sample points are x_m = -L + m dx with dx = 2L/n; the frequency lattice is
// xi_q = q dxi with dxi = pi/L and q in [-n/2, n/2). Spectral arrays use FFT
// order along every axis (q = 0, 1, ..., n/2-1, -n/2, ..., -1) and both
// physical and spectral arrays are row-major with axis 0 slowest.
//
// The transform approximates the continuum Fourier integral:
//
//   f^(xi) = int f(x) exp(-i x.xi) dx        ~  dx^d sum_m f(x_m) exp(-i x_m.xi)
//   f(x)   = (2 pi)^-d int f^(xi) exp(i x.xi) dxi ~ (dxi / 2 pi)^d sum_q ...
//
// so that sum |f|^2 dx^d = (dxi / 2 pi)^d sum |f^|^2 holds exactly. Every
// spectral L2 quantity in the library uses the measure (dxi / 2 pi)^d.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <variant>
#include <vector>

namespace alphamod {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

struct GridSpec {
  int d = 1;
  std::size_t n = 0;
  double L = 0.0;
  double dx = 0.0;
  double dxi = 0.0;
  double xi_max = 0.0;

  std::size_t size() const;
  /// dx^d, the physical quadrature weight.
  double cell_volume() const;
  /// (dxi / 2 pi)^d, the spectral quadrature weight.
  double spectral_weight() const;

  bool operator==(const GridSpec&) const = default;
};

GridSpec make_grid(int d, std::size_t n, double L);

/// Signed lattice index of FFT-ordered position m.
inline long signed_index(std::size_t m, std::size_t n) {
  return m < n / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n);
}

/// FFT-ordered position of signed lattice index q (q in [-n/2, n/2)).
inline std::size_t wrap_index(long q, std::size_t n) {
  return q >= 0 ? static_cast<std::size_t>(q) : static_cast<std::size_t>(q + static_cast<long>(n));
}

/// Per-axis positions of a flat index.
std::array<std::size_t, 3> unflatten(const GridSpec& g, std::size_t flat);
std::size_t flatten(const GridSpec& g, const std::array<std::size_t, 3>& m);

Vec3 position(const GridSpec& g, std::size_t flat);
Vec3 frequency(const GridSpec& g, std::size_t flat);

/// |xi|^2 at every spectral position.
std::vector<double> frequency_norm2(const GridSpec& g);

struct Field {
  GridSpec grid;
  std::vector<cplx> values;
};

struct SpectralField {
  GridSpec grid;
  std::vector<cplx> coefficients;
};

struct Snapshot {
  double t = 0.0;
  Field field;
};

Field zero_field(const GridSpec& g);
SpectralField zero_spectrum(const GridSpec& g);

SpectralField to_spectral(const Field& f);
Field to_physical(const SpectralField& f);

struct Gaussian {
  Vec3 center{};
  double width = 1.0;
  Vec3 modulation{};
  double amplitude = 1.0;
};

struct FourierBump {
  Vec3 center{};
  double width = 1.0;
  cplx amplitude = 1.0;
};

struct SumOfBumps {
  std::vector<FourierBump> bumps;
};

struct PlaneWave {
  Vec3 frequency{};
  double amplitude = 1.0;
};

struct Explicit {
  std::function<cplx(const Vec3&)> sampler;
};

/// Gaussian: A exp(-|x - x0|^2 / (2 w^2) + i xi0.x).
/// FourierBump: spectral profile a phi(|xi - c| / r), phi the radial cut-off.
using FieldSpec = std::variant<Gaussian, FourierBump, SumOfBumps, PlaneWave, Explicit>;

Field sample(const GridSpec& g, const FieldSpec& spec);

/// Spectral samples of bump variants; throws AliasingError when a support
/// ball leaves the open band (-xi_max, xi_max)^d.
SpectralField sample_spectral(const GridSpec& g, const SumOfBumps& bumps);

double l2_norm(const Field& f);
double l2_norm(const SpectralField& f);

/// Largest boundary amplitude divided by the peak amplitude.
double boundary_ratio(const Field& f);

void require_finite(const Field& f);

}  // namespace alphamod
