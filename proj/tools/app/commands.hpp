#pragma once

// Subcommands. Each computes first and writes all of its files afterwards
// into `out`, which must exist.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "config.hpp"

namespace multiac::app {

void cmd_spectrum(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
void cmd_optimize(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
void cmd_qsl_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out,
                   std::ostream& log);
void cmd_rwa_compare(const ExperimentConfig& cfg, const std::filesystem::path& out,
                     std::ostream& log);

// Validates cfg, installs its tolerances, creates the output directory,
// writes config.json there and dispatches by name (spectrum, optimize,
// qsl-sweep, rwa-compare). Returns the output directory.
std::filesystem::path run_command(const std::string& name, const ExperimentConfig& cfg,
                                  std::ostream& log);

}  // namespace multiac::app
