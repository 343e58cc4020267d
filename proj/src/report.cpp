#include "alphamod/report.hpp"

#include <gsl/gsl_fit.h>

#include <algorithm>
#include <cmath>

#include "alphamod/errors.hpp"

namespace alphamod {

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidArgument("fit_loglog: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) throw InvalidArgument("fit_loglog: fewer than two positive points");
  LogLogFit fit;
  fit.points = lx.size();
  double c0, c1, cov00, cov01, cov11, sumsq;
  gsl_fit_linear(lx.data(), 1, ly.data(), 1, lx.size(), &c0, &c1, &cov00, &cov01, &cov11, &sumsq);
  fit.slope = c1;
  fit.intercept = c0;
  double mean = 0.0;
  for (double v : ly) mean += v;
  mean /= static_cast<double>(ly.size());
  double total = 0.0;
  for (double v : ly) total += (v - mean) * (v - mean);
  fit.r2 = total > 0.0 ? 1.0 - sumsq / total : 1.0;
  return fit;
}

std::vector<double> ExperimentReport::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw InvalidArgument("no column named " + name);
  const auto c = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(c));
  return out;
}

}  // namespace alphamod
