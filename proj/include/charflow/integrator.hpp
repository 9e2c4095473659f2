#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "charflow/char_state.hpp"
#include "charflow/errors.hpp"
#include "charflow/flux_model.hpp"
#include "charflow/reconstruct.hpp"
#include "charflow/semilinear.hpp"
#include "charflow/stepping.hpp"

namespace charflow {

inline CharState advanced(const CharState& y, double h, const StateDerivative& d) {
  CharState out = y;
  out.T = y.T + h;
  for (std::size_t i = 0; i < y.size(); ++i) {
    out.u[i] += h * d.du[i];
    out.w[i] += h * d.dw[i];
    out.v[i] += h * d.dv[i];
    out.x[i] += h * d.dx[i];
  }
  return out;
}

inline StateDerivative rk4_combine(const StateDerivative& k1, const StateDerivative& k2, const StateDerivative& k3,
                                   const StateDerivative& k4) {
  auto mix = [](const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& c,
                const std::vector<double>& d) {
    std::vector<double> r(a.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]) / 6.0;
    return r;
  };
  return {mix(k1.du, k2.du, k3.du, k4.du), mix(k1.dw, k2.dw, k3.dw, k4.dw), mix(k1.dv, k2.dv, k3.dv, k4.dv),
          mix(k1.dx, k2.dx, k3.dx, k4.dx)};
}

struct Tolerances {
  double energy_drift_tol = 1e-6;
  double decay_tol = 1e-10;
  double eps_cos = 1e-6;
};

/// Per-step diagnostics, recorded at the end of every step (and at T = 0).
struct StepRecord {
  double T = 0.0;
  double E = 0.0;
  double min_v = 0.0;
  double max_v = 0.0;
  double min_cos2 = 0.0;
  double max_abs_dw = 0.0;     // max |w_T| at the start of the step
  double v_rate = 0.0;         // max |g - P + f''/2| |sin w| at the start of the step
  double max_u2 = 0.0;
  double max_abs_P = 0.0;
  double max_abs_Px = 0.0;
  std::size_t breaking_cells = 0;
};

/// Z-interval of characteristics at or through w = -pi (mod 2 pi) during a step.
struct BreakingEvent {
  double T = 0.0;
  double Z_lo = 0.0;
  double Z_hi = 0.0;
  std::size_t cells = 0;
};

struct RunTrace {
  std::vector<CharState> snapshots;
  std::vector<StepRecord> steps;
  std::vector<BreakingEvent> breaking_events;
  double dt = 0.0;
  double max_drift = 0.0;

  double E0() const { return steps.empty() ? 0.0 : steps.front().E; }
};

struct RunOptions {
  double T_end = 1.0;
  std::optional<double> dt;  // nullopt selects auto_dt
  std::vector<double> snapshot_times;
  Tolerances tol;
  bool abort_on_drift = true;
};

/// min(0.5 dZ, 1e-2) / (1 + max |f'(u0)|).
inline double auto_dt(const CharState& s, const FluxModel& model) {
  double speed = 0.0;
  for (double u : s.u) speed = std::max(speed, std::abs(model.f1(u)));
  return std::min(0.5 * s.Z.step, 1e-2) / (1.0 + speed);
}

/// One RK4 step of size dt (negative dt integrates backwards).
inline CharState step_rk4(const CharState& s, double dt, const FluxModel& model) {
  if (!std::isfinite(dt) || dt == 0.0) throw std::invalid_argument("step_rk4: dt must be finite and nonzero");
  CharState out = rk4_step(s, dt, [&](const CharState& y) { return rhs(y, model); });
  check_state(out);
  return out;
}

namespace detail {

// Index of the 2 pi-branch containing w, with branch edges at w = -pi (mod 2 pi).
inline long breaking_branch(double w) { return static_cast<long>(std::floor((w + std::numbers::pi) / (2.0 * std::numbers::pi))); }

inline StepRecord measure(const CharState& s) {
  StepRecord r;
  r.T = s.T;
  r.E = energy_char(s);
  r.min_v = *std::min_element(s.v.begin(), s.v.end());
  r.max_v = *std::max_element(s.v.begin(), s.v.end());
  r.min_cos2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i) {
    r.min_cos2 = std::min(r.min_cos2, cos2_half(s.w[i]));
    r.max_u2 = std::max(r.max_u2, s.u[i] * s.u[i]);
  }
  return r;
}

inline void record_rates(StepRecord& r, const CharState& s, const FluxModel& model, const StateDerivative& d,
                         const KernelResult& k) {
  r.max_abs_dw = max_abs(d.dw);
  r.max_abs_P = max_abs(k.P);
  r.max_abs_Px = max_abs(k.Px);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double u = s.u[i];
    r.v_rate = std::max(r.v_rate, std::abs(model.g(u) - k.P[i] + 0.5 * model.f2(u)) * std::abs(std::sin(s.w[i])));
  }
}

// Characteristics that sit near w = -pi (mod 2 pi) or crossed it during the step.
inline std::optional<BreakingEvent> detect_breaking(const CharState& before, const CharState& after, double eps_cos) {
  BreakingEvent ev;
  ev.T = after.T;
  bool any = false;
  for (std::size_t i = 0; i < after.size(); ++i) {
    const bool crossed = breaking_branch(before.w[i]) != breaking_branch(after.w[i]);
    if (crossed || cos2_half(after.w[i]) < eps_cos) {
      if (!any) ev.Z_lo = after.Z[i];
      ev.Z_hi = after.Z[i];
      ++ev.cells;
      any = true;
    }
  }
  if (!any) return std::nullopt;
  return ev;
}

}  // namespace detail

/// Integrates from `initial` to opts.T_end with fixed-step RK4, stepping exactly
/// onto each requested snapshot time. Energy is recorded every step; the run
/// aborts with EnergyDriftExceeded once the relative drift passes the tolerance.
inline RunTrace run(const CharState& initial, const FluxModel& model, const RunOptions& opts) {
  if (!(opts.T_end > initial.T)) throw std::invalid_argument("run: T_end must exceed the initial time");
  check_state(initial);
  RunTrace trace;
  trace.dt = opts.dt ? *opts.dt : auto_dt(initial, model);
  if (!(trace.dt > 0.0)) throw std::invalid_argument("run: dt must be positive");

  std::vector<double> targets;
  for (double t : opts.snapshot_times) {
    if (t < initial.T || t > opts.T_end) throw std::invalid_argument("run: snapshot time outside [T0, T_end]");
    targets.push_back(t);
  }
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  std::size_t next_snap = 0;
  while (next_snap < targets.size() && targets[next_snap] <= initial.T) {
    trace.snapshots.push_back(initial);
    ++next_snap;
  }

  const auto f = [&](const CharState& y) { return rhs(y, model); };
  CharState state = initial;
  const double tiny = std::numeric_limits<double>::min();
  StepRecord rec0 = detail::measure(state);
  trace.steps.push_back(rec0);
  const double E0 = rec0.E;

  std::size_t step_index = 0;
  while (state.T < opts.T_end) {
    const double target = next_snap < targets.size() ? targets[next_snap] : opts.T_end;
    double h = trace.dt;
    bool lands = false;
    if (state.T + h >= target - 1e-9 * trace.dt) {
      h = target - state.T;
      lands = true;
    }
    KernelResult k;
    StateDerivative k1 = rhs(state, model, &k);
    detail::record_rates(trace.steps.back(), state, model, k1, k);

    CharState next = rk4_step(state, h, f, std::optional<StateDerivative>(std::move(k1)));
    if (lands) next.T = target;
    check_state(next);
    ++step_index;

    if (auto ev = detail::detect_breaking(state, next, opts.tol.eps_cos)) trace.breaking_events.push_back(*ev);
    StepRecord rec = detail::measure(next);
    if (!trace.breaking_events.empty() && trace.breaking_events.back().T == next.T)
      rec.breaking_cells = trace.breaking_events.back().cells;
    trace.steps.push_back(rec);

    const double drift = std::abs(rec.E - E0) / std::max(E0, tiny);
    trace.max_drift = std::max(trace.max_drift, drift);
    if (opts.abort_on_drift && drift > opts.tol.energy_drift_tol) throw EnergyDriftExceeded(drift, step_index, next.T);

    state = std::move(next);
    while (next_snap < targets.size() && targets[next_snap] <= state.T) {
      trace.snapshots.push_back(state);
      ++next_snap;
    }
  }
  {
    KernelResult k;
    StateDerivative d = rhs(state, model, &k);
    detail::record_rates(trace.steps.back(), state, model, d, k);
  }
  return trace;
}

/// Time of the first crossing of w = -pi (mod 2 pi) by any characteristic,
/// located by bisection inside the step where it happens. Returns nullopt if
/// nothing breaks before T_max.
inline std::optional<double> find_breaking_time(const CharState& initial, const FluxModel& model, double T_max,
                                                std::optional<double> dt = std::nullopt) {
  const double h = dt ? *dt : auto_dt(initial, model);
  const auto crossed = [](const CharState& a, const CharState& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (detail::breaking_branch(a.w[i]) != detail::breaking_branch(b.w[i])) return true;
    return false;
  };
  CharState state = initial;
  while (state.T < T_max) {
    CharState next = step_rk4(state, h, model);
    if (crossed(state, next)) {
      double lo = 0.0, hi = h;
      for (int it = 0; it < 60 && hi - lo > 1e-14 * h; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (crossed(state, step_rk4(state, mid, model)))
          hi = mid;
        else
          lo = mid;
      }
      return state.T + 0.5 * (lo + hi);
    }
    state = std::move(next);
  }
  return std::nullopt;
}

}  // namespace charflow
