#pragma once

// Report serialization: CSV tables with 17 significant digits, JSON
// summaries and gnuplot scripts.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "alphamod/report.hpp"

namespace alphamod {

/// %.17g, with nan / inf / -inf spelled out.
std::string format_double(double v);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);
void write_csv(const std::filesystem::path& path, const ExperimentReport& report);

/// {command, config, metrics, targets, tolerances, pass}.
nlohmann::json make_summary(const std::string& command, const nlohmann::json& config,
                            const nlohmann::json& metrics, const nlohmann::json& targets,
                            const nlohmann::json& tolerances, bool pass);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Slope, intercept, r2, points and the report metrics under `prefix`.
void add_fit_metrics(nlohmann::json& metrics, const ExperimentReport& report, const std::string& prefix = "");

struct PlotSpec {
  std::string csv;
  std::string x;
  std::vector<std::string> y;
  bool logscale = true;
};

/// Writes a gnuplot script plotting each y column against x from `csv`
/// (relative to the script directory).
void write_gnuplot(const std::filesystem::path& path, const PlotSpec& plot,
                   const std::vector<std::string>& columns);

}  // namespace alphamod
