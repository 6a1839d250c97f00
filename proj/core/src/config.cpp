#include "lindqmc/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "lindqmc/errors.hpp"

namespace lindqmc {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"lattice", {"lx", "ly"}},
      {"physics", {"gamma_over_w", "dt_times_w", "n_t"}},
      {"estimator", {"kind", "n_ratio"}},
      {"sampler",
       {"n_warmup", "n_sweeps", "meas_interval", "n_stab", "drift_tol",
        "master_seed"}},
      {"execution", {"max_parallel_chains"}},
      {"output", {"directory", "format"}},
  };
  return keys;
}

std::string trimmed(std::string s) {
  boost::algorithm::trim(s);
  return s;
}

template <typename Int>
Int parse_int(const std::string& field, const std::string& raw) {
  const std::string s = trimmed(raw);
  Int value{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
    throw ConfigError(field, "expected an integer, got '" + raw + "'");
  }
  return value;
}

double parse_double(const std::string& field, const std::string& raw) {
  const std::string s = trimmed(raw);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty() ||
      !std::isfinite(value)) {
    throw ConfigError(field, "expected a finite number, got '" + raw + "'");
  }
  return value;
}

std::vector<int> parse_int_list(const std::string& field,
                                const std::string& raw) {
  std::vector<int> out;
  std::stringstream in(raw);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_int<int>(field, item));
  if (out.empty()) throw ConfigError(field, "empty list");
  return out;
}

}  // namespace

ModelParams RunConfig::model(int n_t) const {
  ModelParams p;
  p.w = 1.0;
  p.gamma = gamma_over_w;
  p.dt = dt_times_w;
  p.n_t = n_t;
  p.n_ratio = n_ratio;
  return p;
}

ChainSettings RunConfig::chain_settings(std::uint64_t seed) const {
  ChainSettings s;
  s.n_warmup = n_warmup;
  s.n_sweeps = n_sweeps;
  s.meas_interval = meas_interval;
  s.seed = seed;
  s.n_stab = n_stab;
  s.drift_tol = drift_tol;
  return s;
}

void RunConfig::validate() const {
  const bool single_site = lx == 1 && ly == 1;
  if (!single_site && lx < 2) throw ConfigError("lattice.lx", "must be >= 2");
  if (!single_site && ly < 2) throw ConfigError("lattice.ly", "must be >= 2");
  if (!(gamma_over_w >= 0.0)) {
    throw ConfigError("physics.gamma_over_w", "must be >= 0");
  }
  if (!(dt_times_w > 0.0)) throw ConfigError("physics.dt_times_w", "must be > 0");
  if (n_t_list.empty()) throw ConfigError("physics.n_t", "empty time scan");
  for (int n : n_t_list) {
    if (n < 0) throw ConfigError("physics.n_t", "entries must be >= 0");
  }
  if (n_ratio < 1) throw ConfigError("estimator.n_ratio", "must be >= 1");
  if (n_warmup < 0) throw ConfigError("sampler.n_warmup", "must be >= 0");
  if (n_sweeps < 1) throw ConfigError("sampler.n_sweeps", "must be >= 1");
  if (meas_interval < 1) {
    throw ConfigError("sampler.meas_interval", "must be >= 1");
  }
  if (n_sweeps / meas_interval < 2) {
    throw ConfigError("sampler.n_sweeps",
                      "must allow at least two measurements");
  }
  if (n_stab < 1) throw ConfigError("sampler.n_stab", "must be >= 1");
  if (!(drift_tol > 0.0)) throw ConfigError("sampler.drift_tol", "must be > 0");
  if (max_parallel_chains < 1) {
    throw ConfigError("execution.max_parallel_chains", "must be >= 1");
  }
}

std::vector<int> default_time_scan(double dt_times_w) {
  std::vector<int> scan;
  for (int k = 0; k <= 12; ++k) {
    scan.push_back(static_cast<int>(std::lround(0.25 * k / dt_times_w)));
  }
  return scan;
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", "line " + std::to_string(e.line()) + ": " +
                                    e.message());
  }

  std::map<std::string, std::string> values;
  for (const auto& [section, body] : tree) {
    const auto known = known_keys().find(section);
    if (known == known_keys().end()) {
      if (body.empty() && !body.data().empty()) {
        throw ConfigError(section, "key outside of any section");
      }
      throw ConfigError(section, "unknown section");
    }
    for (const auto& [key, value] : body) {
      const std::string field = section + "." + key;
      if (!known->second.contains(key)) throw ConfigError(field, "unknown key");
      values[field] = value.data();
    }
  }

  auto required = [&](const std::string& field) -> const std::string& {
    const auto it = values.find(field);
    if (it == values.end()) throw ConfigError(field, "missing required key");
    return it->second;
  };
  auto optional = [&](const std::string& field) -> const std::string* {
    const auto it = values.find(field);
    return it == values.end() ? nullptr : &it->second;
  };

  RunConfig c;
  c.lx = parse_int<int>("lattice.lx", required("lattice.lx"));
  c.ly = parse_int<int>("lattice.ly", required("lattice.ly"));
  c.gamma_over_w =
      parse_double("physics.gamma_over_w", required("physics.gamma_over_w"));
  if (auto* v = optional("physics.dt_times_w")) {
    c.dt_times_w = parse_double("physics.dt_times_w", *v);
  }
  if (auto* v = optional("physics.n_t")) {
    c.n_t_list = parse_int_list("physics.n_t", *v);
  } else if (c.dt_times_w > 0.0) {
    c.n_t_list = default_time_scan(c.dt_times_w);
  }
  try {
    c.kind = parse_observable(trimmed(required("estimator.kind")));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("estimator.kind", e.what());
  }
  if (auto* v = optional("estimator.n_ratio")) {
    c.n_ratio = parse_int<int>("estimator.n_ratio", *v);
  }
  if (auto* v = optional("sampler.n_warmup")) {
    c.n_warmup = parse_int<int>("sampler.n_warmup", *v);
  }
  if (auto* v = optional("sampler.n_sweeps")) {
    c.n_sweeps = parse_int<int>("sampler.n_sweeps", *v);
  }
  if (auto* v = optional("sampler.meas_interval")) {
    c.meas_interval = parse_int<int>("sampler.meas_interval", *v);
  }
  if (auto* v = optional("sampler.n_stab")) {
    c.n_stab = parse_int<int>("sampler.n_stab", *v);
  }
  if (auto* v = optional("sampler.drift_tol")) {
    c.drift_tol = parse_double("sampler.drift_tol", *v);
  }
  if (auto* v = optional("sampler.master_seed")) {
    c.master_seed = parse_int<std::uint64_t>("sampler.master_seed", *v);
  }
  if (auto* v = optional("execution.max_parallel_chains")) {
    c.max_parallel_chains =
        parse_int<int>("execution.max_parallel_chains", *v);
  }
  if (auto* v = optional("output.directory")) {
    c.output_directory = trimmed(*v);
  }
  if (auto* v = optional("output.format")) {
    const std::string f = trimmed(*v);
    if (f == "csv") {
      c.format = OutputFormat::csv;
    } else if (f == "json") {
      c.format = OutputFormat::json;
    } else {
      throw ConfigError("output.format", "expected csv or json, got '" + f + "'");
    }
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace lindqmc
