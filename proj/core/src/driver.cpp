#include "lindqmc/driver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <thread>

#include <nlohmann/json.hpp>

#include "lindqmc/errors.hpp"
#include "lindqmc/lattice.hpp"
#include "lindqmc/oracle.hpp"
#include "lindqmc/validate.hpp"

namespace lindqmc {
namespace {

using nlohmann::json;

struct Job {
  int time_index;
  int n_t;
  int factor_index;
  std::uint64_t seed;
};

json config_to_json(const RunConfig& c) {
  return {
      {"lattice", {{"lx", c.lx}, {"ly", c.ly}}},
      {"physics",
       {{"gamma_over_w", c.gamma_over_w},
        {"dt_times_w", c.dt_times_w},
        {"n_t", c.n_t_list}}},
      {"estimator",
       {{"kind", std::string(to_string(c.kind))}, {"n_ratio", c.n_ratio}}},
      {"sampler",
       {{"n_warmup", c.n_warmup},
        {"n_sweeps", c.n_sweeps},
        {"meas_interval", c.meas_interval},
        {"n_stab", c.n_stab},
        {"drift_tol", c.drift_tol},
        {"master_seed", c.master_seed}}},
      {"execution", {{"max_parallel_chains", c.max_parallel_chains}}},
      {"output",
       {{"directory", c.output_directory},
        {"format", c.format == OutputFormat::csv ? "csv" : "json"}}},
  };
}

void write_series(const RunConfig& config, const FidelitySeries& series,
                  const std::filesystem::path& dir, const std::string& stem) {
  if (config.format == OutputFormat::csv) {
    std::ofstream out(dir / (stem + ".csv"));
    write_series_csv(series, out);
  } else {
    std::ofstream out(dir / (stem + ".json"));
    write_series_json(series, out);
  }
}

std::filesystem::path prepare_dir(const RunConfig& config,
                                  const CommandOverrides& overrides) {
  const auto dir = resolve_output_dir(config, overrides);
  std::filesystem::create_directories(dir);
  return dir;
}

RunConfig load_with_overrides(const std::filesystem::path& path,
                              const CommandOverrides& overrides) {
  RunConfig config = load_config(path);
  if (overrides.seed) config.master_seed = *overrides.seed;
  if (overrides.jobs) config.max_parallel_chains = *overrides.jobs;
  config.validate();
  return config;
}

}  // namespace

bool RunOutcome::ok() const {
  return std::all_of(series.points.begin(), series.points.end(),
                     [](const SeriesPoint& p) { return p.ok; });
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17e", value);
  return buffer;
}

std::filesystem::path resolve_output_dir(const RunConfig& config,
                                         const CommandOverrides& overrides) {
  if (overrides.out_dir) return *overrides.out_dir;
  if (!config.output_directory.empty()) return config.output_directory;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "lindqmc-out";
}

RunOutcome execute_run(const RunConfig& config) {
  config.validate();
  const Lattice lattice(config.lx, config.ly);
  const HoppingSpectrum spectrum(lattice.adjacency());

  std::vector<Job> jobs;
  for (std::size_t ti = 0; ti < config.n_t_list.size(); ++ti) {
    const int n_t = config.n_t_list[ti];
    if (n_t == 0) continue;
    for (int f = 0; f < config.n_ratio; ++f) {
      jobs.push_back({static_cast<int>(ti), n_t, f,
                      derive_seed(config.master_seed, ti, f)});
    }
  }

  std::vector<ChainRecord> records(jobs.size());
  std::vector<ChainResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const Job& job = jobs[j];
      ChainRecord& rec = records[j];
      rec.time_index = job.time_index;
      rec.n_t = job.n_t;
      rec.factor_index = job.factor_index;
      rec.seed = job.seed;
      try {
        results[j] = run_chain(config.chain_settings(job.seed), spectrum,
                               config.model(job.n_t), job.factor_index,
                               config.kind);
        rec.factor = summarize(results[j]);
        rec.max_drift = results[j].max_drift;
        rec.rebuilds = results[j].rebuilds;
        rec.ok = true;
      } catch (const std::exception& e) {
        rec.error = "chain (n_t=" + std::to_string(job.n_t) + ", factor " +
                    std::to_string(job.factor_index) + ", seed " +
                    std::to_string(job.seed) + "): " + e.what();
      }
    }
  };
  const int n_workers = std::max(
      1, std::min<int>(config.max_parallel_chains, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<TimePointChains> points;
  for (std::size_t ti = 0; ti < config.n_t_list.size(); ++ti) {
    TimePointChains tp;
    tp.n_t = config.n_t_list[ti];
    if (tp.n_t > 0) {
      std::vector<ChainResult> chains;
      for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (jobs[j].time_index != static_cast<int>(ti)) continue;
        if (!records[j].ok) {
          if (tp.error.empty()) tp.error = records[j].error;
          continue;
        }
        chains.push_back(std::move(results[j]));
      }
      if (tp.error.empty()) {
        tp.chain = make_ratio_chain(config.kind, config.model(tp.n_t), chains);
      }
    }
    points.push_back(std::move(tp));
  }

  RunOutcome outcome;
  outcome.series = assemble_series(config.kind, config.model(0),
                                   lattice.volume(), points);
  outcome.chains = std::move(records);
  return outcome;
}

void write_series_csv(const FidelitySeries& series, std::ostream& out) {
  out << "t_w,log_ratio,stderr,V,kind\n";
  for (const auto& p : series.points) {
    if (!p.ok) continue;
    out << format_double(p.t_w) << ',' << format_double(p.log_value) << ','
        << format_double(p.std_error) << ',' << p.volume << ','
        << to_string(p.kind) << '\n';
  }
}

void write_series_json(const FidelitySeries& series, std::ostream& out) {
  json rows = json::array();
  for (const auto& p : series.points) {
    if (!p.ok) continue;
    rows.push_back({{"t_w", p.t_w},
                    {"log_ratio", p.log_value},
                    {"stderr", p.std_error},
                    {"V", p.volume},
                    {"kind", std::string(to_string(p.kind))}});
  }
  out << json{{"columns", {"t_w", "log_ratio", "stderr", "V", "kind"}},
              {"rows", rows}}
             .dump(2)
      << '\n';
}

int cmd_run(const std::filesystem::path& config_path,
            const CommandOverrides& overrides, std::ostream& out,
            std::ostream& err) {
  RunConfig config;
  try {
    config = load_with_overrides(config_path, overrides);
  } catch (const ConfigError& e) {
    err << "invalid config: " << e.what() << '\n';
    return kExitBadConfig;
  }
  const auto started = std::chrono::steady_clock::now();
  const RunOutcome outcome = execute_run(config);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();

  const auto dir = prepare_dir(config, overrides);
  write_series(config, outcome.series, dir, "series");

  json seeds = json::array();
  json failures = json::array();
  double max_drift = 0.0;
  for (const auto& c : outcome.chains) {
    max_drift = std::max(max_drift, c.max_drift);
    seeds.push_back({{"time_index", c.time_index},
                     {"n_t", c.n_t},
                     {"factor", c.factor_index},
                     {"seed", c.seed},
                     {"ok", c.ok},
                     {"mean", c.factor.mean},
                     {"stderr", c.factor.std_error},
                     {"n_samples", c.factor.n_samples},
                     {"bin_size", c.factor.bin_size},
                     {"acceptance", c.factor.acceptance},
                     {"max_drift", c.max_drift},
                     {"rebuilds", c.rebuilds}});
    if (!c.ok) failures.push_back(c.error);
  }
  json anchors = json::array();
  for (int n_t : config.n_t_list) {
    const ModelParams p = config.model(n_t);
    anchors.push_back(
        {{"n_t", n_t},
         {"t_w", p.time() * p.w},
         {"log_anchor", anchor_log(config.kind, p, config.volume())},
         {"log_purity_anchor_alternative",
          anchor_log_alternative(p, config.volume())}});
  }
  json run = {{"config", config_to_json(config)},
              {"volume", config.volume()},
              {"lambda", config.model(1).lambda()},
              {"chains", seeds},
              {"anchors", anchors},
              {"max_drift", max_drift},
              {"failures", failures},
              {"wall_time_s", wall}};
  std::ofstream(dir / "run.json") << run.dump(2) << '\n';

  if (!outcome.ok()) {
    for (const auto& p : outcome.series.points) {
      if (!p.ok) err << "time point n_t=" << p.n_t << " failed: " << p.error << '\n';
    }
    return kExitNumerical;
  }
  out << "wrote " << (dir / "series").string()
      << (config.format == OutputFormat::csv ? ".csv" : ".json") << " ("
      << outcome.series.points.size() << " points, " << wall << " s)\n";
  return kExitOk;
}

int cmd_oracle(const std::filesystem::path& config_path,
               const CommandOverrides& overrides, std::ostream& out,
               std::ostream& err) {
  RunConfig config;
  try {
    config = load_with_overrides(config_path, overrides);
    if (config.volume() > 4) {
      throw ConfigError("lattice", "oracle is limited to V <= 4 (got " +
                                       std::to_string(config.volume()) + ")");
    }
  } catch (const ConfigError& e) {
    err << "invalid config: " << e.what() << '\n';
    return kExitBadConfig;
  }
  const Lattice lattice(config.lx, config.ly);
  const Eigen::MatrixXd adjacency = lattice.adjacency();
  const int v = lattice.volume();
  const double log_norm = 2.0 * v * std::numbers::ln2;

  FidelitySeries exact{config.kind, v, {}};
  FidelitySeries trotter{config.kind, v, {}};
  for (int n_t : config.n_t_list) {
    const ModelParams p = config.model(n_t);
    const ExactFidelities f = exact_fidelities(adjacency, p.w, p.gamma, p.time());
    const Complex fe = config.kind == Observable::echo ? f.echo : f.purity;
    const Complex ft = trotter_trace(adjacency, p, config.kind);
    SeriesPoint point;
    point.n_t = n_t;
    point.t_w = p.time() * p.w;
    point.volume = v;
    point.kind = config.kind;
    point.log_value = std::log(fe.real()) - log_norm;
    exact.points.push_back(point);
    point.log_value = std::log(ft.real()) - log_norm;
    trotter.points.push_back(point);
  }
  const auto dir = prepare_dir(config, overrides);
  write_series(config, exact, dir, "oracle_exact");
  write_series(config, trotter, dir, "oracle_trotter");
  out << "wrote oracle series for " << exact.points.size() << " time points to "
      << dir.string() << '\n';
  return kExitOk;
}

int cmd_validate(std::ostream& out) {
  const auto checks = run_validation();
  print_checks(checks, out);
  std::vector<std::string> failed;
  for (const auto& c : checks)
    if (!c.passed) failed.push_back(c.name);
  if (failed.empty()) {
    out << "all " << checks.size() << " checks passed\n";
    return kExitOk;
  }
  out << failed.size() << " check(s) failed:";
  for (const auto& name : failed) out << ' ' << name;
  out << '\n';
  return kExitCheckFailed;
}

}  // namespace lindqmc
