#include <iostream>

#include <CLI11.hpp>

#include "slrd/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Variance growth and CLT checks for spatial linear processes over inflated regions"};
  app.set_version_flag("--version", std::string(slrd::version()));
  std::string command;
  slrd::CommandLine cli;
  std::string out;
  std::uint64_t seed = 0;
  app.add_option("command", command, "scan | decompose | limits | mc | report")
      ->required()
      ->check(CLI::IsMember({"scan", "decompose", "limits", "mc", "report"}));
  app.add_option("--config", cli.config_path, "Run configuration (INI)")->required();
  auto* out_opt = app.add_option("--out", out, "Output directory (overrides [experiment] output)");
  auto* seed_opt = app.add_option("--seed", seed, "Base seed (overrides [experiment] base_seed)");
  app.add_option("--threads", cli.threads, "OpenMP threads (0 keeps the runtime default)")->check(CLI::NonNegativeNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : slrd::exit_validation;
  }
  cli.command = slrd::parse_command(command);
  if (*out_opt) cli.out = out;
  if (*seed_opt) cli.seed = seed;
  return slrd::run_command_line(cli);
}
