#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace alphamod {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters (grid shape, exponents, out-of-range indices...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Spectral content would fall outside the representable Nyquist band.
class AliasingError : public Error {
 public:
  using Error::Error;
};

/// The alpha-covering leaves a lattice point with zero total weight.
class CoverageError : public Error {
 public:
  CoverageError(const std::string& what, std::vector<double> uncovered_xi, double suggested_c)
      : Error(what), uncovered_xi_(std::move(uncovered_xi)), suggested_c_(suggested_c) {}

  const std::vector<double>& uncovered_xi() const { return uncovered_xi_; }
  double suggested_c() const { return suggested_c_; }

 private:
  std::vector<double> uncovered_xi_;
  double suggested_c_;
};

/// Homogeneous Sobolev norm with negative order applied to data with a zero mode.
class ZeroModeError : public Error {
 public:
  using Error::Error;
};

/// A refinement loop (time quadrature, tail window) failed to settle.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// Picard iteration did not contract.
class ContractionFailure : public Error {
 public:
  ContractionFailure(const std::string& what, std::vector<double> ratios)
      : Error(what), ratios_(std::move(ratios)) {}
  const std::vector<double>& ratios() const { return ratios_; }

 private:
  std::vector<double> ratios_;
};

/// No integer lies in the requested frequency window.
class WindowEmpty : public Error {
 public:
  using Error::Error;
};

/// Configuration does not satisfy the published schema.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace alphamod
