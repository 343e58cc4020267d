#include "alphamod/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace alphamod::kernels {

namespace {

inline double abs2(cplx z) { return z.real() * z.real() + z.imag() * z.imag(); }

inline double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

inline cplx unit_phase(double theta) { return {std::cos(theta), std::sin(theta)}; }

template <class BlockFn>
double blocked_sum(std::size_t n, BlockFn&& block) {
  const std::ptrdiff_t nblocks =
      static_cast<std::ptrdiff_t>((n + kReductionBlock - 1) / kReductionBlock);
  std::vector<double> partial(static_cast<std::size_t>(nblocks), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nblocks; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    partial[static_cast<std::size_t>(b)] = block(lo, hi);
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace

void scale(std::span<cplx> data, double factor) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) data[i] *= factor;
}

void multiply(std::span<cplx> data, std::span<const double> factors) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) data[i] *= factors[i];
}

void multiply(std::span<cplx> data, std::span<const cplx> factors) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) data[i] *= factors[i];
}

void dispersion_phase(std::span<cplx> data, std::span<const double> symbol, double t) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) data[i] *= unit_phase(-t * symbol[i]);
}

void nonlinear_phase(std::span<cplx> u, double coupling_dt, int kappa) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    u[i] *= unit_phase(coupling_dt * ipow(abs2(u[i]), kappa));
  }
}

void power_nonlinearity(std::span<const cplx> u, int kappa, std::span<cplx> out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = ipow(abs2(u[i]), kappa) * u[i];
}

double sum_abs2(std::span<const cplx> data) {
  return blocked_sum(data.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += abs2(data[i]);
    return s;
  });
}

double sum_abs_pow(std::span<const cplx> data, double p) {
  return blocked_sum(data.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += std::pow(std::abs(data[i]), p);
    return s;
  });
}

double max_abs(std::span<const cplx> data) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(data.size());
  double m = 0.0;
#pragma omp parallel for reduction(max : m) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, std::abs(data[i]));
  return m;
}

namespace serial {

void scale(std::span<cplx> data, double factor) {
  for (auto& z : data) z *= factor;
}

void multiply(std::span<cplx> data, std::span<const double> factors) {
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= factors[i];
}

void multiply(std::span<cplx> data, std::span<const cplx> factors) {
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= factors[i];
}

void dispersion_phase(std::span<cplx> data, std::span<const double> symbol, double t) {
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= unit_phase(-t * symbol[i]);
}

void nonlinear_phase(std::span<cplx> u, double coupling_dt, int kappa) {
  for (auto& z : u) z *= unit_phase(coupling_dt * ipow(abs2(z), kappa));
}

void power_nonlinearity(std::span<const cplx> u, int kappa, std::span<cplx> out) {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = ipow(abs2(u[i]), kappa) * u[i];
}

double sum_abs2(std::span<const cplx> data) {
  double s = 0.0;
  for (const auto& z : data) s += abs2(z);
  return s;
}

double sum_abs_pow(std::span<const cplx> data, double p) {
  double s = 0.0;
  for (const auto& z : data) s += std::pow(std::abs(z), p);
  return s;
}

double max_abs(std::span<const cplx> data) {
  double m = 0.0;
  for (const auto& z : data) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace serial

}  // namespace alphamod::kernels
