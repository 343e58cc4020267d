#pragma once

#include <complex>
#include <cstddef>

namespace alphamod::detail {

/// Unnormalised d-dimensional DFT with n points per axis, out of place.
/// sign = -1 forward, +1 backward.
void dft(int d, std::size_t n, int sign, const std::complex<double>* in, std::complex<double>* out);

}  // namespace alphamod::detail
