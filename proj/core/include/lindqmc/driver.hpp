#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lindqmc/config.hpp"
#include "lindqmc/estimator.hpp"
#include "lindqmc/sampler.hpp"

namespace lindqmc {

/// Command-line values that take precedence over the config file.
struct CommandOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
  std::optional<int> jobs;
};

/// Exit codes of the command-line entry points.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitBadConfig = 2,
  kExitNumerical = 3,
};

struct ChainRecord {
  int time_index = 0;
  int n_t = 0;
  int factor_index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  RatioFactor factor;
  double max_drift = 0.0;
  long rebuilds = 0;
};

struct RunOutcome {
  FidelitySeries series;
  std::vector<ChainRecord> chains;  ///< sorted by (time_index, factor_index)
  bool ok() const;
};

/// Runs every (time point, factor) chain on a bounded worker pool. Chain
/// failures are recorded, not thrown; the affected time points are marked.
RunOutcome execute_run(const RunConfig& config);

/// Directory precedence: override, config, environment, "lindqmc-out".
std::filesystem::path resolve_output_dir(const RunConfig& config,
                                         const CommandOverrides& overrides);

/// Header `t_w,log_ratio,stderr,V,kind`, numbers in %.17e. Failed points are
/// left out.
void write_series_csv(const FidelitySeries& series, std::ostream& out);
void write_series_json(const FidelitySeries& series, std::ostream& out);

/// Full-precision scientific formatting used for every numeric output.
std::string format_double(double value);

int cmd_run(const std::filesystem::path& config_path,
            const CommandOverrides& overrides, std::ostream& out,
            std::ostream& err);
int cmd_oracle(const std::filesystem::path& config_path,
               const CommandOverrides& overrides, std::ostream& out,
               std::ostream& err);
int cmd_validate(std::ostream& out);

}  // namespace lindqmc
