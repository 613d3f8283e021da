#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slrd/config.hpp"

namespace slrd {

enum ExitCode : int { exit_ok = 0, exit_validation = 1, exit_runtime = 2 };

/// Runs the configured command and writes its files into config.output; returns the written paths.
std::vector<std::string> run(const RunConfig& config);

struct CommandLine {
  Command command = Command::report;
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

/// Loads the config, applies overrides, runs, and writes error.json on failure.
int run_command_line(const CommandLine& cli);

}  // namespace slrd
