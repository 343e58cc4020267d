#pragma once

// Run configuration for the command-line tool. The JSON schema in
// schemas/run_config.schema.json is compiled in; every default below is
// also written there and a test keeps the two in step.

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace alphamod {

struct GridBlock {
  int d = 1;
  std::size_t n = 1024;
  double L = 40.0;
};

struct PhysicsBlock {
  double lambda = 1.0;
  int kappa = 1;
};

struct SpaceBlock {
  double alpha = 0.5;
  double s = 0.1;
  /// 0 calibrates the covering constant.
  double C = 0.0;
  double q = 1.0;
  double p = 2.0;
};

struct FieldBlock {
  std::string type = "gaussian";
  std::vector<double> center{0.0, 0.0, 0.0};
  double width = 1.0;
  double amplitude = 1.0;
  std::vector<double> modulation{0.0, 0.0, 0.0};
  /// When positive the field is rescaled to this smooth M^{s,alpha}_{2,1} norm.
  double norm = 0.0;
};

struct DecomposeBlock {
  std::vector<double> alphas{0.0, 0.3, 0.5, 0.8};
  double dyadic_tolerance = 1e-14;
  double alpha_tolerance = 1e-12;
};

struct EvolveBlock {
  double t_end = 1.0;
  double dt = 1e-3;
  std::size_t snapshot_stride = 100;
  bool dealias = false;
  double max_phase_per_step = 0.0;
  bool export_snapshots = true;
  double mass_tolerance = 1e-10;
};

struct StrichartzBlock {
  /// "inf" in JSON maps to +infinity.
  double q = 4.0;
  double r = std::numeric_limits<double>::infinity();
  std::vector<long> k{1, 2, 4, 8, 16};
  double width_fraction = 0.25;
  double C = 1.0;
  double T0 = 20.0;
  double rel_tol = 5e-3;
  double tolerance = 0.15;
};

struct BilinearBlock {
  std::vector<double> separations{8.0, 16.0, 32.0, 64.0, 128.0};
  double width = 0.25;
  std::string pattern = "uv";
  double tail_tol = 1e-2;
  double tolerance = 0.1;
};

struct ConstructBlock {
  double eps = 1e-2;
  long J = 1;
  std::size_t max_pieces = 0;
  double c = 0.125;
  std::vector<double> sigmas{16.0, 32.0, 64.0, 128.0, 256.0};
  std::vector<std::size_t> refinements{8192, 16384, 32768, 65536, 131072};
  double slope_tolerance = 0.1;
  double besov_tolerance = 0.1;
};

struct InflateBlock {
  std::vector<long> N{8, 16, 32, 64, 128};
  std::size_t points_per_width = 8;
  std::string method = "resonant";
  double tolerance = 0.1;
};

struct PicardBlock {
  std::size_t max_iter = 20;
  double tol = 1e-12;
  double max_ratio = 0.1;
  std::size_t max_iterations = 4;
};

struct GlasseyBlock {
  double beta = 0.5;
  /// 0 picks the amplitude giving negative energy.
  double amplitude = 0.0;
  double twin_t_end = 1.0;
  double growth_target = 10.0;
  double twin_bound = 2.0;
};

struct OutputBlock {
  std::string dir = "out";
  /// Empty uses the command name.
  std::string prefix;
};

struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  GridBlock grid;
  PhysicsBlock physics;
  SpaceBlock space;
  FieldBlock field;
  DecomposeBlock decompose;
  EvolveBlock evolve;
  StrichartzBlock strichartz;
  BilinearBlock bilinear;
  ConstructBlock construct;
  InflateBlock inflate;
  PicardBlock picard;
  GlasseyBlock glassey;
  OutputBlock output;
};

/// The compiled-in schema.
const nlohmann::json& run_config_schema();

/// Validates `instance` against the subset of JSON Schema used by the run
/// schema (type, enum, properties, required, additionalProperties, items,
/// minItems, maxItems, minimum, maximum, exclusiveMinimum, exclusiveMaximum).
/// Returns one message per violation.
std::vector<std::string> schema_violations(const nlohmann::json& instance, const nlohmann::json& schema);

/// Throws ConfigError listing every violation.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Fully resolved configuration, every field present.
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace alphamod
