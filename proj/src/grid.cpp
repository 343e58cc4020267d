#include "alphamod/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "alphamod/bump.hpp"
#include "alphamod/errors.hpp"
#include "alphamod/kernels.hpp"
#include "fft.hpp"

namespace alphamod {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// (-1)^(q_1 + ... + q_d) for the spectral position of `flat`.
std::vector<double> checkerboard(const GridSpec& g) {
  std::vector<double> s(g.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto m = unflatten(g, i);
    std::size_t parity = 0;
    for (int a = 0; a < g.d; ++a) parity += m[a];
    s[i] = (parity % 2 == 0) ? 1.0 : -1.0;
  }
  return s;
}

}  // namespace

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int a = 0; a < d; ++a) s *= n;
  return s;
}

double GridSpec::cell_volume() const { return std::pow(dx, d); }

double GridSpec::spectral_weight() const { return std::pow(dxi / (2.0 * std::numbers::pi), d); }

GridSpec make_grid(int d, std::size_t n, double L) {
  if (d < 1 || d > 3) throw InvalidArgument("dimension must be 1, 2 or 3");
  if (!is_power_of_two(n) || n < 16) throw InvalidArgument("n must be a power of two >= 16");
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("half length L must be positive");
  GridSpec g;
  g.d = d;
  g.n = n;
  g.L = L;
  g.dx = 2.0 * L / static_cast<double>(n);
  g.dxi = std::numbers::pi / L;
  g.xi_max = static_cast<double>(n) * g.dxi / 2.0;
  return g;
}

std::array<std::size_t, 3> unflatten(const GridSpec& g, std::size_t flat) {
  std::array<std::size_t, 3> m{0, 0, 0};
  for (int a = g.d - 1; a >= 0; --a) {
    m[a] = flat % g.n;
    flat /= g.n;
  }
  return m;
}

std::size_t flatten(const GridSpec& g, const std::array<std::size_t, 3>& m) {
  std::size_t flat = 0;
  for (int a = 0; a < g.d; ++a) flat = flat * g.n + m[a];
  return flat;
}

Vec3 position(const GridSpec& g, std::size_t flat) {
  const auto m = unflatten(g, flat);
  Vec3 x{0.0, 0.0, 0.0};
  for (int a = 0; a < g.d; ++a) x[a] = -g.L + static_cast<double>(m[a]) * g.dx;
  return x;
}

Vec3 frequency(const GridSpec& g, std::size_t flat) {
  const auto m = unflatten(g, flat);
  Vec3 xi{0.0, 0.0, 0.0};
  for (int a = 0; a < g.d; ++a) xi[a] = static_cast<double>(signed_index(m[a], g.n)) * g.dxi;
  return xi;
}

std::vector<double> frequency_norm2(const GridSpec& g) {
  std::vector<double> axis(g.n);
  for (std::size_t m = 0; m < g.n; ++m) {
    const double xi = static_cast<double>(signed_index(m, g.n)) * g.dxi;
    axis[m] = xi * xi;
  }
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto m = unflatten(g, i);
    double s = 0.0;
    for (int a = 0; a < g.d; ++a) s += axis[m[a]];
    out[i] = s;
  }
  return out;
}

Field zero_field(const GridSpec& g) { return Field{g, std::vector<cplx>(g.size())}; }

SpectralField zero_spectrum(const GridSpec& g) {
  return SpectralField{g, std::vector<cplx>(g.size())};
}

SpectralField to_spectral(const Field& f) {
  const GridSpec& g = f.grid;
  SpectralField out = zero_spectrum(g);
  detail::dft(g.d, g.n, -1, f.values.data(), out.coefficients.data());
  auto sign = checkerboard(g);
  const double w = g.cell_volume();
  for (auto& s : sign) s *= w;
  kernels::multiply(out.coefficients, sign);
  return out;
}

Field to_physical(const SpectralField& f) {
  const GridSpec& g = f.grid;
  std::vector<cplx> tmp = f.coefficients;
  auto sign = checkerboard(g);
  const double w = g.spectral_weight();
  for (auto& s : sign) s *= w;
  kernels::multiply(tmp, sign);
  Field out = zero_field(g);
  detail::dft(g.d, g.n, +1, tmp.data(), out.values.data());
  return out;
}

SpectralField sample_spectral(const GridSpec& g, const SumOfBumps& spec) {
  SpectralField out = zero_spectrum(g);
  for (const auto& b : spec.bumps) {
    if (!(b.width > 0.0)) throw InvalidArgument("bump width must be positive");
    for (int a = 0; a < g.d; ++a) {
      if (b.center[a] - 2.0 * b.width <= -g.xi_max || b.center[a] + 2.0 * b.width >= g.xi_max) {
        std::ostringstream msg;
        msg << "bump support on axis " << a << " leaves the band (-" << g.xi_max << ", "
            << g.xi_max << ")";
        throw AliasingError(msg.str());
      }
    }
    // Visit only the lattice box enclosing the support ball.
    std::array<long, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < g.d; ++a) {
      lo[a] = static_cast<long>(std::ceil((b.center[a] - 2.0 * b.width) / g.dxi));
      hi[a] = static_cast<long>(std::floor((b.center[a] + 2.0 * b.width) / g.dxi));
    }
    std::array<long, 3> q = lo;
    while (true) {
      double r2 = 0.0;
      std::array<std::size_t, 3> m{0, 0, 0};
      for (int a = 0; a < g.d; ++a) {
        const double dxi = static_cast<double>(q[a]) * g.dxi - b.center[a];
        r2 += dxi * dxi;
        m[a] = wrap_index(q[a], g.n);
      }
      const double v = bump_radial(std::sqrt(r2) / b.width);
      if (v > 0.0) out.coefficients[flatten(g, m)] += b.amplitude * v;
      int a = g.d - 1;
      while (a >= 0 && q[a] == hi[a]) {
        q[a] = lo[a];
        --a;
      }
      if (a < 0) break;
      ++q[a];
    }
  }
  return out;
}

Field sample(const GridSpec& g, const FieldSpec& spec) {
  return std::visit(
      [&](const auto& s) -> Field {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FourierBump>) {
          return to_physical(sample_spectral(g, SumOfBumps{{s}}));
        } else if constexpr (std::is_same_v<T, SumOfBumps>) {
          return to_physical(sample_spectral(g, s));
        } else {
          Field f = zero_field(g);
          if constexpr (std::is_same_v<T, Gaussian>) {
            if (!(s.width > 0.0)) throw InvalidArgument("gaussian width must be positive");
          }
          if constexpr (std::is_same_v<T, PlaneWave>) {
            for (int a = 0; a < g.d; ++a) {
              if (std::abs(s.frequency[a]) >= g.xi_max) {
                throw AliasingError("plane wave frequency outside the band");
              }
            }
          }
          if constexpr (std::is_same_v<T, Explicit>) {
            if (!s.sampler) throw InvalidArgument("explicit field without sampler");
          }
          for (std::size_t i = 0; i < f.values.size(); ++i) {
            const Vec3 x = position(g, i);
            if constexpr (std::is_same_v<T, Gaussian>) {
              double r2 = 0.0, phase = 0.0;
              for (int a = 0; a < g.d; ++a) {
                r2 += (x[a] - s.center[a]) * (x[a] - s.center[a]);
                phase += s.modulation[a] * x[a];
              }
              f.values[i] = s.amplitude * std::exp(-r2 / (2.0 * s.width * s.width)) *
                            cplx(std::cos(phase), std::sin(phase));
            } else if constexpr (std::is_same_v<T, PlaneWave>) {
              double phase = 0.0;
              for (int a = 0; a < g.d; ++a) phase += s.frequency[a] * x[a];
              f.values[i] = s.amplitude * cplx(std::cos(phase), std::sin(phase));
            } else {
              f.values[i] = s.sampler(x);
            }
          }
          return f;
        }
      },
      spec);
}

double l2_norm(const Field& f) {
  return std::sqrt(kernels::sum_abs2(f.values) * f.grid.cell_volume());
}

double l2_norm(const SpectralField& f) {
  return std::sqrt(kernels::sum_abs2(f.coefficients) * f.grid.spectral_weight());
}

double boundary_ratio(const Field& f) {
  const GridSpec& g = f.grid;
  const double peak = kernels::max_abs(f.values);
  if (peak == 0.0) return 0.0;
  double edge = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const auto m = unflatten(g, i);
    bool on_edge = false;
    for (int a = 0; a < g.d; ++a) on_edge = on_edge || m[a] == 0 || m[a] == g.n - 1;
    if (on_edge) edge = std::max(edge, std::abs(f.values[i]));
  }
  return edge / peak;
}

void require_finite(const Field& f) {
  for (const auto& z : f.values) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw InvalidArgument("field contains non-finite values");
    }
  }
}

}  // namespace alphamod
