#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "charflow/char_state.hpp"
#include "charflow/errors.hpp"
#include "charflow/flux_model.hpp"
#include "charflow/kernel.hpp"
#include "charflow/numerics.hpp"
#include "charflow/stepping.hpp"

namespace charflow {

/// u(t, x) on a uniform grid, for the classical (pre-breaking) formulation
/// u_t + f'(u) u_x + P_x = 0.
struct ClassicalState {
  double t = 0.0;
  UniformGrid x;
  std::vector<double> u;
};

struct ClassicalRate {
  std::vector<double> du;
};

inline ClassicalState advanced(const ClassicalState& y, double h, const ClassicalRate& d) {
  ClassicalState out = y;
  out.t = y.t + h;
  for (std::size_t i = 0; i < out.u.size(); ++i) out.u[i] += h * d.du[i];
  return out;
}

inline ClassicalRate rk4_combine(const ClassicalRate& k1, const ClassicalRate& k2, const ClassicalRate& k3,
                                 const ClassicalRate& k4) {
  ClassicalRate r{std::vector<double>(k1.du.size())};
  for (std::size_t i = 0; i < r.du.size(); ++i) r.du[i] = (k1.du[i] + 2.0 * k2.du[i] + 2.0 * k3.du[i] + k4.du[i]) / 6.0;
  return r;
}

/// du = -f'(u) u_x - P_x, with u_x from fourth-order differences.
inline ClassicalRate classical_rhs(const ClassicalState& s, const FluxModel& model, KernelResult* kernel_out = nullptr) {
  const auto ux = derivative4(s.u, s.x.step);
  KernelResult k = source_terms_physical(s.u, ux, s.x, model);
  ClassicalRate r{std::vector<double>(s.u.size())};
  for (std::size_t i = 0; i < r.du.size(); ++i) {
    r.du[i] = -model.f1(s.u[i]) * ux[i] - k.Px[i];
    if (!std::isfinite(r.du[i])) throw StepBlowUp("u", s.t);
  }
  if (kernel_out) *kernel_out = std::move(k);
  return r;
}

/// int (u^2 + u_x^2) dx, trapezoid rule with fourth-order u_x.
inline double classical_energy(const ClassicalState& s) {
  const auto ux = derivative4(s.u, s.x.step);
  std::vector<double> e(s.u.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = s.u[i] * s.u[i] + ux[i] * ux[i];
  return trapezoid(e, s.x.step);
}

struct ClassicalOptions {
  std::size_t n_x = 0;             // 0 keeps the datum's own sampling (which must be uniform)
  double breaking_threshold = 50;  // sup |u_x| beyond which the formulation is abandoned
};

struct ClassicalRun {
  ClassicalState state;
  double energy0 = 0.0;
  double energy = 0.0;
  double drift = 0.0;  // |E(t_end) - E(0)| / E(0), 0 for a zero datum
  double max_abs_P = 0.0;
  double max_abs_Px = 0.0;
};

/// The datum sampled on the classical grid: exact evaluators when present,
/// otherwise the datum's own samples (which must then be uniform).
inline ClassicalState classical_initial(const InitialDatum& datum, std::size_t n_x = 0) {
  ClassicalState s;
  if (n_x == 0) {
    const std::size_t n = datum.size();
    s.x = UniformGrid::spanning(datum.x.front(), datum.x.back(), n);
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(datum.x[i] - s.x[i]) > 1e-9 * s.x.step) throw DatumError("classical solver needs a uniform x-grid");
    s.u = datum.u;
    return s;
  }
  if (n_x < 5) throw DatumError("classical solver needs at least 5 points");
  s.x = UniformGrid::spanning(datum.x.front(), datum.x.back(), n_x);
  s.u.resize(n_x);
  if (datum.u_exact) {
    for (std::size_t i = 0; i < n_x; ++i) s.u[i] = datum.u_exact(s.x[i]);
  } else {
    const MonotoneCubic u_of_x(datum.x, datum.u);
    for (std::size_t i = 0; i < n_x; ++i) s.u[i] = u_of_x(s.x[i]);
  }
  return s;
}

/// min(0.5 dx, 1e-2) / (1 + max |f'(u)|).
inline double classical_auto_dt(const ClassicalState& s, const FluxModel& model) {
  double speed = 0.0;
  for (double u : s.u) speed = std::max(speed, std::abs(model.f1(u)));
  return std::min(0.5 * s.x.step, 1e-2) / (1.0 + speed);
}

/// RK4 over classical_rhs to t_end (last step shortened to land on it).
/// Throws BreakingApproached once sup |u_x| passes the threshold.
inline ClassicalRun classical_run(const InitialDatum& datum, const FluxModel& model, double t_end, double dt,
                                  const ClassicalOptions& opts = {}) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw std::invalid_argument("classical_run: need dt > 0 and t_end >= 0");
  ClassicalRun out;
  ClassicalState s = classical_initial(datum, opts.n_x);
  out.energy0 = classical_energy(s);

  auto track = [&](const ClassicalState& y, const KernelResult& k) {
    out.max_abs_P = std::max(out.max_abs_P, max_abs(k.P));
    out.max_abs_Px = std::max(out.max_abs_Px, max_abs(k.Px));
    const double sup = max_abs(derivative4(y.u, y.x.step));
    if (sup > opts.breaking_threshold) throw BreakingApproached(y.t, sup);
  };
  const auto f = [&](const ClassicalState& y) { return classical_rhs(y, model); };

  while (s.t < t_end) {
    const double h = std::min(dt, t_end - s.t);
    KernelResult k;
    ClassicalRate k1 = classical_rhs(s, model, &k);
    track(s, k);
    const bool last = s.t + h >= t_end;
    s = rk4_step(s, h, f, std::optional<ClassicalRate>(std::move(k1)));
    if (last) s.t = t_end;
  }
  {
    KernelResult k;
    classical_rhs(s, model, &k);
    track(s, k);
  }
  out.energy = classical_energy(s);
  out.drift = out.energy0 > 0.0 ? std::abs(out.energy - out.energy0) / out.energy0 : 0.0;
  out.state = std::move(s);
  return out;
}

}  // namespace charflow
