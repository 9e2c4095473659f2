#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "charflow/char_state.hpp"
#include "charflow/errors.hpp"
#include "charflow/flux_model.hpp"
#include "charflow/integrator.hpp"
#include "charflow/kernel.hpp"
#include "charflow/reconstruct.hpp"

namespace charflow {

/// Max-norm residuals of the three pointwise identities linking Z-derivatives
/// to the state: u_Z = v sin(w) / 2, P_Z = v P_x cos^2(w/2), x_Z = v cos^2(w/2).
struct IdentityResiduals {
  double u_Z = 0.0;
  double P_Z = 0.0;
  double x_Z = 0.0;
  std::size_t masked = 0;  // interior nodes skipped

  double max() const { return std::max({u_Z, P_Z, x_Z}); }
};

/// Centred differences against pointwise right-hand sides. Nodes whose stencil
/// touches a singular characteristic or a near-breaking node (cos^2 < eps_cos)
/// are left out.
inline IdentityResiduals identity_suite(const CharState& s, const FluxModel& model, double eps_cos = 1e-6) {
  IdentityResiduals r;
  const std::size_t n = s.size();
  if (n < 3) return r;
  const KernelResult k = source_terms(s, model);
  const double h2 = 2.0 * s.Z.step;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    bool skip = s.touches_singular(i - 1, i + 1);
    for (std::size_t j = i - 1; j <= i + 1 && !skip; ++j) skip = cos2_half(s.w[j]) < eps_cos;
    if (skip) {
      ++r.masked;
      continue;
    }
    const double c2 = cos2_half(s.w[i]);
    r.u_Z = std::max(r.u_Z, std::abs((s.u[i + 1] - s.u[i - 1]) / h2 - 0.5 * s.v[i] * std::sin(s.w[i])));
    r.P_Z = std::max(r.P_Z, std::abs((k.P[i + 1] - k.P[i - 1]) / h2 - s.v[i] * k.Px[i] * c2));
    r.x_Z = std::max(r.x_Z, std::abs((s.x[i + 1] - s.x[i - 1]) / h2 - s.v[i] * c2));
  }
  return r;
}

/// Fraction of recorded steps whose breaking set spans more than ten cells.
/// The cell counts are those the run recorded at its own eps_cos.
inline double theta_sampler(const RunTrace& trace) {
  if (trace.steps.empty()) return 0.0;
  std::size_t wide = 0;
  for (const auto& r : trace.steps)
    if (r.breaking_cells > 10) ++wide;
  return static_cast<double>(wide) / static_cast<double>(trace.steps.size());
}

/// Total length of the steps that ended with a detected breaking set, as a
/// fraction of the run's duration.
inline double breaking_time_fraction(const RunTrace& trace) {
  if (trace.steps.size() < 2) return 0.0;
  double inside = 0.0;
  for (std::size_t i = 1; i < trace.steps.size(); ++i)
    if (trace.steps[i].breaking_cells > 0) inside += trace.steps[i].T - trace.steps[i - 1].T;
  const double span = trace.steps.back().T - trace.steps.front().T;
  return span > 0.0 ? inside / span : 0.0;
}

struct EnergySample {
  double T = 0.0;
  double E_char = 0.0;
  double E_phys = 0.0;
  double drift_rel = 0.0;
  bool E_phys_lower_bound = false;
};

struct EnergyReport {
  double E0 = 0.0;
  std::vector<EnergySample> series;  // one entry per snapshot
  double max_drift = 0.0;            // over every step of the run
  double theta_fraction = 0.0;
};

inline double relative_drift(double E, double E0) {
  return std::abs(E - E0) / std::max(E0, std::numeric_limits<double>::min());
}

inline EnergyReport energy_report(const RunTrace& trace, const UniformGrid& x_grid, double eps_cos = 1e-6) {
  EnergyReport rep;
  rep.E0 = trace.E0();
  rep.theta_fraction = theta_sampler(trace);
  for (const auto& r : trace.steps) rep.max_drift = std::max(rep.max_drift, relative_drift(r.E, rep.E0));
  for (const auto& snap : trace.snapshots) {
    EnergySample e;
    e.T = snap.T;
    e.E_char = energy_char(snap);
    const auto est = energy_physical_estimate(to_physical(snap, x_grid, eps_cos));
    e.E_phys = est.value;
    e.E_phys_lower_bound = est.lower_bound;
    e.drift_rel = relative_drift(e.E_char, rep.E0);
    rep.series.push_back(e);
  }
  return rep;
}

/// max |u(x) + u(-x)| on a grid symmetric about 0.
inline double antisymmetry_error(const PhysicalField& f) {
  const std::size_t n = f.u.size();
  const double tol = 1e-9 * f.x.step;
  if (n == 0 || std::abs(f.x.front() + f.x.back()) > tol)
    throw std::invalid_argument("antisymmetry_error: grid is not symmetric about 0");
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(f.u[i] + f.u[n - 1 - i]));
  return worst;
}

/// A C^1 test function psi(t, x) with its partial derivatives.
struct TestFunction {
  std::function<double(double, double)> psi, psi_t, psi_x;
};

/// Discrete weak-form residual of the differentiated equation, written in
/// characteristic variables:
///   int int ( -u_Z psi_T + psi ((P - g) cos^2(w/2) - f''/2 sin^2(w/2)) v ) dZ dT
///   - int u_Z(0) psi(0) dZ,
/// with psi_T = psi_t + f'(u) psi_x along characteristics. `states` must be
/// equally spaced in T starting at 0 and psi must vanish past the last one.
inline double weak_form_residual(const std::vector<CharState>& states, const FluxModel& model, const TestFunction& tf) {
  if (states.size() < 2) throw std::invalid_argument("weak_form_residual: need at least two states");
  const double dT = states[1].T - states[0].T;
  double total = 0.0;
  std::vector<double> slice;
  for (std::size_t m = 0; m < states.size(); ++m) {
    const CharState& s = states[m];
    const std::size_t n = s.size();
    const KernelResult k = source_terms(s, model);
    slice.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = s.T, x = s.x[i], u = s.u[i];
      const double uZ = 0.5 * s.v[i] * std::sin(s.w[i]);
      const double psiT = tf.psi_t(t, x) + model.f1(u) * tf.psi_x(t, x);
      const double src = ((k.P[i] - model.g(u)) * cos2_half(s.w[i]) - 0.5 * model.f2(u) * sin2_half(s.w[i])) * s.v[i];
      slice[i] = -uZ * psiT + tf.psi(t, x) * src;
    }
    const double wt = (m == 0 || m + 1 == states.size()) ? 0.5 * dT : dT;
    total += wt * trapezoid(slice, s.Z.step);
  }
  const CharState& s0 = states.front();
  slice.assign(s0.size(), 0.0);
  for (std::size_t i = 0; i < s0.size(); ++i) slice[i] = 0.5 * s0.v[i] * std::sin(s0.w[i]) * tf.psi(s0.T, s0.x[i]);
  return total - trapezoid(slice, s0.Z.step);
}

/// key = value report with insertion order preserved.
class Report {
 public:
  void add(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }
  void add(std::string key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    add(std::move(key), std::string(buf));
  }
  void add(std::string key, std::size_t value) { add(std::move(key), std::to_string(value)); }
  void add(std::string key, bool value) { add(std::move(key), std::string(value ? "true" : "false")); }

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write report: " + path);
    for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace charflow
