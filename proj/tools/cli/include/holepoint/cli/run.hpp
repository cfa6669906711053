#pragma once

#include <iosfwd>
#include <string>

#include "holepoint/cli/config.hpp"
#include "holepoint/cli/report.hpp"

namespace holepoint::cli {

/// Runs the pipeline of one command and returns the report without writing
/// it. Field files of the solve command go to out_dir. Throws ConfigInvalid
/// when the config lacks what the command needs; per-eps failures are
/// recorded in the report.
SweepReport execute(const ExperimentConfig& config, Command command, const std::string& out_dir);

struct RunOptions {
  std::string out_dir = ".";
  bool quiet = false;
};

/// execute, then write the report files and print a summary to out.
/// Returns 0 on success, 1 on a config or I/O error, 2 when some eps failed.
int run(const ExperimentConfig& config, Command command, const RunOptions& options,
        std::ostream& out, std::ostream& err);

/// Version and build hash compiled into the tool.
std::string version();
std::string build_hash();

}  // namespace holepoint::cli
