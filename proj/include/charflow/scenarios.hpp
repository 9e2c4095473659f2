#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "charflow/char_state.hpp"
#include "charflow/errors.hpp"
#include "charflow/numerics.hpp"

namespace charflow {

/// Named initial profile: zero, peakon(c, x0), antipeakon_pair(c, a),
/// gaussian(A, s) or custom_file(path), sampled on [-L, L].
struct ScenarioSpec {
  std::string name = "zero";
  std::vector<double> params;
  std::string path;  // custom_file only
  double L = 30.0;
  std::size_t n_x = 65537;
};

/// Parses "name(p1, p2, ...)" or a bare "name".
inline ScenarioSpec parse_scenario(const std::string& text) {
  ScenarioSpec spec;
  const auto open = text.find('(');
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  if (open == std::string::npos) {
    spec.name = trim(text);
  } else {
    const auto close = text.rfind(')');
    if (close == std::string::npos || close < open) throw ConfigError("scenario: unbalanced parentheses in '" + text + "'");
    spec.name = trim(text.substr(0, open));
    const std::string inner = text.substr(open + 1, close - open - 1);
    if (spec.name == "custom_file") {
      spec.path = trim(inner);
    } else {
      std::stringstream ss(inner);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
          std::size_t used = 0;
          spec.params.push_back(std::stod(item, &used));
          if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
          throw ConfigError("scenario: bad numeric parameter '" + item + "'");
        }
      }
    }
  }
  const auto expect = [&](std::size_t count) {
    if (spec.params.size() != count)
      throw ConfigError("scenario '" + spec.name + "' expects " + std::to_string(count) + " parameters");
  };
  if (spec.name == "zero") expect(0);
  else if (spec.name == "peakon" || spec.name == "antipeakon_pair" || spec.name == "gaussian") expect(2);
  else if (spec.name == "custom_file") {
    if (spec.path.empty()) throw ConfigError("custom_file needs a path");
  } else {
    throw ConfigError("unknown scenario '" + spec.name + "'");
  }
  return spec;
}

namespace detail {

inline double sgn_or_zero(double z) { return z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0); }

inline InitialDatum sample(const ScenarioSpec& spec, std::function<double(double)> u, std::function<double(double)> ux,
                           std::vector<double> kinks) {
  const auto grid = UniformGrid::spanning(-spec.L, spec.L, spec.n_x);
  InitialDatum d;
  d.x = grid.points();
  d.u.resize(grid.size);
  d.ux.resize(grid.size);
  for (std::size_t i = 0; i < grid.size; ++i) {
    d.u[i] = u(d.x[i]);
    d.ux[i] = ux(d.x[i]);
  }
  d.kinks = std::move(kinks);
  d.u_exact = std::move(u);
  d.ux_exact = std::move(ux);
  return d;
}

}  // namespace detail

/// Reads the two-column "x u" text format headed by "# charflow-initial v1".
/// Samples must be uniformly spaced; u_x comes from fourth-order differences.
inline InitialDatum read_initial_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open initial-data file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line.rfind("# charflow-initial v1", 0) != 0)
    throw ConfigError("initial-data file '" + path + "' lacks the '# charflow-initial v1' header");
  InitialDatum d;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double x = 0.0, u = 0.0;
    if (!(ls >> x >> u)) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected two numbers");
    d.x.push_back(x);
    d.u.push_back(u);
  }
  if (d.x.size() < 5) throw ConfigError("initial-data file '" + path + "' has fewer than 5 samples");
  const double h = (d.x.back() - d.x.front()) / static_cast<double>(d.x.size() - 1);
  for (std::size_t i = 1; i < d.x.size(); ++i)
    if (std::abs((d.x[i] - d.x[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw ConfigError("initial-data file '" + path + "' is not uniformly spaced");
  d.ux = derivative4(d.u, h);
  return d;
}

inline InitialDatum make_scenario(const ScenarioSpec& spec) {
  if (spec.name == "zero") {
    return detail::sample(spec, [](double) { return 0.0; }, [](double) { return 0.0; }, {});
  }
  if (spec.name == "peakon") {
    const double c = spec.params.at(0), x0 = spec.params.at(1);
    return detail::sample(
        spec, [=](double x) { return c * std::exp(-std::abs(x - x0)); },
        [=](double x) { return -c * detail::sgn_or_zero(x - x0) * std::exp(-std::abs(x - x0)); }, {x0});
  }
  if (spec.name == "antipeakon_pair") {
    const double c = spec.params.at(0), a = spec.params.at(1);
    return detail::sample(
        spec, [=](double x) { return c * (std::exp(-std::abs(x + a)) - std::exp(-std::abs(x - a))); },
        [=](double x) {
          return c * (-detail::sgn_or_zero(x + a) * std::exp(-std::abs(x + a)) +
                      detail::sgn_or_zero(x - a) * std::exp(-std::abs(x - a)));
        },
        {-a, a});
  }
  if (spec.name == "gaussian") {
    const double A = spec.params.at(0), s = spec.params.at(1);
    return detail::sample(
        spec, [=](double x) { return A * std::exp(-(x / s) * (x / s)); },
        [=](double x) { return -2.0 * A * x / (s * s) * std::exp(-(x / s) * (x / s)); }, {});
  }
  if (spec.name == "custom_file") return read_initial_file(spec.path);
  throw ConfigError("unknown scenario '" + spec.name + "'");
}

}  // namespace charflow
