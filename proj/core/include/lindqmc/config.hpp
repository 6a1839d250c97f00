#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lindqmc/bss.hpp"
#include "lindqmc/model.hpp"
#include "lindqmc/sampler.hpp"

namespace lindqmc {

enum class OutputFormat { csv, json };

/// Run description, read from an INI-style file:
///
///   [lattice]    lx, ly
///   [physics]    gamma_over_w, dt_times_w, n_t (comma-separated list)
///   [estimator]  kind (echo|purity), n_ratio
///   [sampler]    n_warmup, n_sweeps, meas_interval, n_stab, drift_tol,
///                master_seed
///   [execution]  max_parallel_chains
///   [output]     directory, format (csv|json)
///
/// Energies are measured in units of the hopping w, which is fixed to 1.
struct RunConfig {
  int lx = 0;
  int ly = 0;
  double gamma_over_w = 0.0;
  double dt_times_w = 0.05;
  std::vector<int> n_t_list;
  Observable kind = Observable::purity;
  int n_ratio = 32;
  int n_warmup = 200;
  int n_sweeps = 2000;
  int meas_interval = 2;
  int n_stab = 10;
  double drift_tol = 1e-6;
  std::uint64_t master_seed = 20220101;
  int max_parallel_chains = 1;
  std::string output_directory;  ///< empty: fall back to the environment
  OutputFormat format = OutputFormat::csv;

  int volume() const { return lx * ly; }
  /// Model at a given time index of the scan.
  ModelParams model(int n_t) const;
  ChainSettings chain_settings(std::uint64_t seed) const;
  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

/// Default time scan: w t from 0 to 3 in steps of 0.25 at the given dt.
std::vector<int> default_time_scan(double dt_times_w);

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Environment variable consulted when neither the config nor the command
/// line names an output directory.
inline constexpr const char* kOutputDirEnv = "LINDQMC_OUTPUT_DIR";

}  // namespace lindqmc
