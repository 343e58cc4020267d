#pragma once

// Tabular experiment results and the log-log fit used by every sweep.

#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace alphamod {

struct LogLogFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double r2 = std::numeric_limits<double>::quiet_NaN();
  std::size_t points = 0;
};

/// Least squares of log y against log x. Needs at least two positive pairs.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct ExperimentReport {
  std::string experiment;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  LogLogFit fit;
  double target = std::numeric_limits<double>::quiet_NaN();
  double tolerance = std::numeric_limits<double>::quiet_NaN();
  /// Extra scalar results, keyed by name (sorted for stable output).
  std::map<std::string, double> metrics;
  bool pass = false;

  /// Values of one named column.
  std::vector<double> column(const std::string& name) const;
};

}  // namespace alphamod
