#pragma once

#include <filesystem>

#include "mhdbl/config.hpp"

namespace mhdbl {

/// Exit-code table: 0 success, 2 parse/validation, 3 numerical or outflow
/// blow-up, 4 lower bound lost, 5 eigenpair not found, 1 anything else.
int exit_code_for(ErrorKind kind);

/// Runs a validated config, writing report.json and the command's CSV files
/// (and snapshots) into out_dir. Module errors are caught, recorded in
/// report.json and turned into the exit code.
int run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

/// Reads and parses config_path, then runs it. Parse and validation failures
/// also produce a report.json (exit 2) and compute never starts.
int run_from_file(Command command, const std::filesystem::path& config_path, const std::filesystem::path& out_dir);

}  // namespace mhdbl
