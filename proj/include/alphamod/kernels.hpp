#pragma once

// Data-parallel inner loops shared by every module.
//
// Each kernel exists twice: an OpenMP version in `alphamod::kernels` used by
// the library, and a plain loop in `alphamod::kernels::serial` kept as the
// reference the tests and the benchmark compare against.
//
// Reductions in the parallel path are computed over fixed blocks of
// `kReductionBlock` elements and the block partials are summed in index
// order, so the result does not depend on the number of threads.

#include <complex>
#include <cstddef>
#include <span>

namespace alphamod::kernels {

using cplx = std::complex<double>;

inline constexpr std::size_t kReductionBlock = 2048;

void scale(std::span<cplx> data, double factor);
void multiply(std::span<cplx> data, std::span<const double> factors);
void multiply(std::span<cplx> data, std::span<const cplx> factors);

/// data[i] *= exp(-i * t * symbol[i]).
void dispersion_phase(std::span<cplx> data, std::span<const double> symbol, double t);

/// u[i] *= exp(i * coupling_dt * |u[i]|^(2 kappa)).
void nonlinear_phase(std::span<cplx> u, double coupling_dt, int kappa);

/// out[i] = |u[i]|^(2 kappa) u[i].
void power_nonlinearity(std::span<const cplx> u, int kappa, std::span<cplx> out);

double sum_abs2(std::span<const cplx> data);
double sum_abs_pow(std::span<const cplx> data, double p);
double max_abs(std::span<const cplx> data);

namespace serial {

void scale(std::span<cplx> data, double factor);
void multiply(std::span<cplx> data, std::span<const double> factors);
void multiply(std::span<cplx> data, std::span<const cplx> factors);
void dispersion_phase(std::span<cplx> data, std::span<const double> symbol, double t);
void nonlinear_phase(std::span<cplx> u, double coupling_dt, int kappa);
void power_nonlinearity(std::span<const cplx> u, int kappa, std::span<cplx> out);
double sum_abs2(std::span<const cplx> data);
double sum_abs_pow(std::span<const cplx> data, double p);
double max_abs(std::span<const cplx> data);

}  // namespace serial

}  // namespace alphamod::kernels
