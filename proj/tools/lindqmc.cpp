// Command-line entry point: run, oracle, validate.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lindqmc/driver.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Determinant QMC for fidelities of dephasing free fermions"};
  app.require_subcommand(1);

  lindqmc::CommandOverrides overrides;
  std::uint64_t seed = 0;
  std::string out_dir;
  int jobs = 0;
  std::string config_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "Run configuration (INI)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "Override sampler.master_seed");
    cmd->add_option("--out-dir", out_dir, "Override output.directory");
    cmd->add_option("--jobs", jobs, "Override execution.max_parallel_chains")
        ->check(CLI::PositiveNumber);
  };

  auto* run = app.add_subcommand("run", "Monte Carlo fidelity series");
  add_common(run);
  auto* oracle = app.add_subcommand("oracle", "Exact and Trotterised series for V <= 4");
  add_common(oracle);
  app.add_subcommand("validate", "Run the invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lindqmc::kExitBadConfig;
  }

  auto collect = [&](CLI::App* cmd) {
    if (cmd->count("--seed")) overrides.seed = seed;
    if (cmd->count("--out-dir")) overrides.out_dir = out_dir;
    if (cmd->count("--jobs")) overrides.jobs = jobs;
  };

  if (run->parsed()) {
    collect(run);
    return lindqmc::cmd_run(config_path, overrides, std::cout, std::cerr);
  }
  if (oracle->parsed()) {
    collect(oracle);
    return lindqmc::cmd_oracle(config_path, overrides, std::cout, std::cerr);
  }
  return lindqmc::cmd_validate(std::cout);
}
