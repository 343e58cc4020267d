#pragma once

// Experiment commands behind the command-line tool. Each command writes
// <prefix>_*.csv tables and <prefix>_summary.json into the output directory.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "alphamod/config.hpp"
#include "alphamod/grid.hpp"

namespace alphamod {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitConfig = 2, kExitInternal = 3 };

struct RunOptions {
  /// Overrides output.dir when non-empty.
  std::filesystem::path out_dir;
  /// OpenMP threads for the sweeps; 0 keeps the runtime default.
  int jobs = 0;
  bool emit_gnuplot = false;
};

struct RunOutcome {
  int exit_code = kExitInternal;
  nlohmann::json summary;
  std::vector<std::filesystem::path> files;
};

/// Field described by the field block, sampled on `g`.
Field build_field(const RunConfig& cfg, const GridSpec& g);

/// Runs cfg.command. Throws ConfigError for settings the schema cannot
/// express (grid shape, unsupported dimension); experiment errors become a
/// failing summary.
RunOutcome run(const RunConfig& cfg, const RunOptions& opts = {});

/// Parses the command line, runs, and maps every outcome to an exit code.
int cli_main(int argc, char** argv);

}  // namespace alphamod
