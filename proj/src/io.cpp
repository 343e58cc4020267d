#include "alphamod/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "alphamod/errors.hpp"

namespace alphamod {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out = open_out(path);
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw InvalidArgument("CSV row width differs from the header");
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const ExperimentReport& report) {
  write_csv(path, report.columns, report.rows);
}

json make_summary(const std::string& command, const json& config, const json& metrics, const json& targets,
                  const json& tolerances, bool pass) {
  return {{"command", command}, {"config", config},         {"metrics", metrics},
          {"targets", targets}, {"tolerances", tolerances}, {"pass", pass}};
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

void add_fit_metrics(json& metrics, const ExperimentReport& report, const std::string& prefix) {
  metrics[prefix + "slope"] = report.fit.slope;
  metrics[prefix + "intercept"] = report.fit.intercept;
  metrics[prefix + "r2"] = report.fit.r2;
  metrics[prefix + "points"] = report.fit.points;
  for (const auto& [key, value] : report.metrics) metrics[prefix + key] = value;
}

void write_gnuplot(const std::filesystem::path& path, const PlotSpec& plot, const std::vector<std::string>& columns) {
  auto index_of = [&](const std::string& name) {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw InvalidArgument("no column " + name);
    return static_cast<std::size_t>(it - columns.begin()) + 1;
  };
  std::ofstream out = open_out(path);
  out << "set datafile separator ','\n";
  out << "set key autotitle columnhead\n";
  out << "set xlabel '" << plot.x << "'\n";
  if (plot.logscale) out << "set logscale xy\n";
  out << "plot ";
  for (std::size_t i = 0; i < plot.y.size(); ++i) {
    out << (i ? ", \\\n     " : "") << "'" << plot.csv << "' using " << index_of(plot.x) << ":"
        << index_of(plot.y[i]) << " with linespoints";
  }
  out << "\npause -1\n";
}

}  // namespace alphamod
