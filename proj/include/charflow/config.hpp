#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "charflow/errors.hpp"
#include "charflow/flux_model.hpp"
#include "charflow/integrator.hpp"
#include "charflow/scenarios.hpp"

namespace charflow {

/// Everything one command needs, read from a flat `key = value` file.
///
///   model.type = camassa_holm | rod | generalized_rod
///   model.k = 1.0
///   model.g_coeffs = 0, 0, 1.5          # monomial basis, constant term first
///   scenario = antipeakon_pair(1, 5)
///   scenario.L = 30
///   scenario.n_x = 65537                # samples of the initial datum
///   grid.n_Z = 4096
///   time.T_end = 1.0
///   time.dt = auto | <number>
///   time.snapshots = 0, 0.5, 1.0
///   tolerances.energy_drift_tol = 1e-6
///   tolerances.decay_tol = 1e-10
///   tolerances.eps_cos = 1e-6
///   run.abort_on_drift = true
///   output.n_x = 4097                   # physical grid for field output
///   compare.tolerance = 5e-3
///   compare.dt = auto | <number>        # classical solver step
///   compare.n_x = 0                     # classical grid; 0 means grid.n_Z
///
/// Blank lines and text after '#' are ignored. Unknown keys are errors.
struct RunConfig {
  ModelSpec model;
  ScenarioSpec scenario;
  std::size_t n_Z = 4096;
  double T_end = 1.0;
  std::optional<double> dt;
  std::vector<double> snapshot_times;
  Tolerances tol;
  bool abort_on_drift = true;
  std::size_t output_n_x = 4097;
  double compare_tolerance = 5e-3;
  std::optional<double> compare_dt;
  std::size_t compare_n_x = 0;

  RunOptions run_options() const {
    RunOptions o;
    o.T_end = T_end;
    o.dt = dt;
    o.snapshot_times = snapshot_times;
    o.tol = tol;
    o.abort_on_drift = abort_on_drift;
    return o;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
}

inline std::size_t parse_count(const std::string& key, const std::string& text) {
  const double v = parse_real(key, text);
  if (v < 0 || v != std::floor(v)) throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  return static_cast<std::size_t>(v);
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_real(key, item));
  }
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

}  // namespace detail

/// Raw key/value pairs; duplicate keys and malformed lines are errors.
inline std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& origin = "config") {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
    if (!kv.emplace(key, value).second) throw ConfigError(where + ": duplicate key '" + key + "'");
  }
  return kv;
}

inline RunConfig config_from_pairs(const std::map<std::string, std::string>& kv) {
  static const std::set<std::string> known = {
      "model.type",      "model.k",          "model.g_coeffs",   "scenario",
      "scenario.L",      "scenario.n_x",     "grid.n_Z",         "time.T_end",
      "time.dt",         "time.snapshots",   "tolerances.energy_drift_tol",
      "tolerances.decay_tol", "tolerances.eps_cos", "run.abort_on_drift",
      "output.n_x",      "compare.tolerance", "compare.dt",      "compare.n_x"};
  for (const auto& [k, v] : kv)
    if (!known.count(k)) throw ConfigError("unknown key '" + k + "'");

  RunConfig c;
  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  if (auto v = get("model.type")) {
    if (*v == "camassa_holm") c.model.kind = ModelKind::camassa_holm;
    else if (*v == "rod") c.model.kind = ModelKind::rod;
    else if (*v == "generalized_rod") c.model.kind = ModelKind::generalized_rod;
    else throw ConfigError("model.type: unknown model '" + *v + "'");
  }
  if (auto v = get("model.k")) c.model.k = detail::parse_real("model.k", *v);
  if (auto v = get("model.g_coeffs")) c.model.g_coeffs = detail::parse_list("model.g_coeffs", *v);
  if (c.model.kind == ModelKind::generalized_rod && c.model.g_coeffs.empty())
    throw ConfigError("model.g_coeffs is required for generalized_rod");

  if (auto v = get("scenario")) c.scenario = parse_scenario(*v);
  if (auto v = get("scenario.L")) c.scenario.L = detail::parse_real("scenario.L", *v);
  if (auto v = get("scenario.n_x")) c.scenario.n_x = detail::parse_count("scenario.n_x", *v);
  if (!(c.scenario.L > 0.0)) throw ConfigError("scenario.L must be positive");
  if (c.scenario.n_x < 5) throw ConfigError("scenario.n_x must be at least 5");

  if (auto v = get("grid.n_Z")) c.n_Z = detail::parse_count("grid.n_Z", *v);
  if (c.n_Z < 16) throw ConfigError("grid.n_Z must be at least 16");

  if (auto v = get("time.T_end")) c.T_end = detail::parse_real("time.T_end", *v);
  if (!(c.T_end > 0.0)) throw ConfigError("time.T_end must be positive");
  if (auto v = get("time.dt"); v && *v != "auto") {
    c.dt = detail::parse_real("time.dt", *v);
    if (!(*c.dt > 0.0)) throw ConfigError("time.dt must be positive or 'auto'");
  }
  if (auto v = get("time.snapshots")) c.snapshot_times = detail::parse_list("time.snapshots", *v);
  for (double t : c.snapshot_times)
    if (t < 0.0 || t > c.T_end) throw ConfigError("time.snapshots must lie in [0, time.T_end]");

  if (auto v = get("tolerances.energy_drift_tol")) c.tol.energy_drift_tol = detail::parse_real("tolerances.energy_drift_tol", *v);
  if (auto v = get("tolerances.decay_tol")) c.tol.decay_tol = detail::parse_real("tolerances.decay_tol", *v);
  if (auto v = get("tolerances.eps_cos")) c.tol.eps_cos = detail::parse_real("tolerances.eps_cos", *v);
  if (!(c.tol.energy_drift_tol > 0.0) || !(c.tol.decay_tol > 0.0) || !(c.tol.eps_cos > 0.0))
    throw ConfigError("tolerances must be positive");
  if (auto v = get("run.abort_on_drift")) c.abort_on_drift = detail::parse_bool("run.abort_on_drift", *v);

  if (auto v = get("output.n_x")) c.output_n_x = detail::parse_count("output.n_x", *v);
  if (c.output_n_x < 3) throw ConfigError("output.n_x must be at least 3");
  if (auto v = get("compare.tolerance")) c.compare_tolerance = detail::parse_real("compare.tolerance", *v);
  if (auto v = get("compare.dt"); v && *v != "auto") {
    c.compare_dt = detail::parse_real("compare.dt", *v);
    if (!(*c.compare_dt > 0.0)) throw ConfigError("compare.dt must be positive or 'auto'");
  }
  if (auto v = get("compare.n_x")) c.compare_n_x = detail::parse_count("compare.n_x", *v);
  return c;
}

inline RunConfig parse_config(std::istream& in, const std::string& origin = "config") {
  return config_from_pairs(parse_key_values(in, origin));
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

}  // namespace charflow
