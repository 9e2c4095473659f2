#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "charflow/char_state.hpp"
#include "charflow/errors.hpp"
#include "charflow/kernel.hpp"
#include "charflow/numerics.hpp"

namespace charflow {

/// Physical-space field at time t on a uniform x-grid. `valid[i]` is false
/// where u_x is undefined (wave breaking); there `ux` holds a signed infinity.
struct PhysicalField {
  double t = 0.0;
  UniformGrid x;
  std::vector<double> u;
  std::vector<double> ux;
  std::vector<char> valid;
  double energy = 0.0;
  double flat_segment_jump = 0.0;  // largest |u(Z_right) - u(Z_left)| across collapsed runs
};

/// E = int (u^2 cos^2(w/2) + sin^2(w/2)) v dZ: trapezoid rule on the Z-grid,
/// corrected for the kink and step at each singular characteristic.
inline double energy_char(const CharState& s) {
  std::vector<double> e(s.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = (s.u[i] * s.u[i] * cos2_half(s.w[i]) + sin2_half(s.w[i])) * s.v[i];
  const double h = s.Z.step;
  double E = trapezoid(e, h);
  for (const auto& sp : singular_points(s)) {
    const auto l = detail::energy_jet(detail::primitive_left(s, sp));
    const auto r = detail::energy_jet(detail::primitive_right(s, sp));
    E -= detail::kink_error(r.slope - l.slope, r.value - l.value, sp.theta, h);
  }
  return E;
}

struct EnergyEstimate {
  double value = 0.0;
  bool lower_bound = false;  // set when more than 1% of the samples were masked
};

/// Trapezoid rule for int (u^2 + u_x^2) dx over cells with both ends valid.
inline EnergyEstimate energy_physical_estimate(const PhysicalField& f) {
  const std::size_t n = f.x.size;
  double acc = 0.0;
  std::size_t masked = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (!f.valid[i]) ++masked;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!f.valid[i] || !f.valid[i + 1]) continue;
    const double a = f.u[i] * f.u[i] + f.ux[i] * f.ux[i];
    const double b = f.u[i + 1] * f.u[i + 1] + f.ux[i + 1] * f.ux[i + 1];
    acc += 0.5 * f.x.step * (a + b);
  }
  return {acc, n > 0 && static_cast<double>(masked) >= 0.01 * static_cast<double>(n)};
}

inline double energy_physical(const PhysicalField& f) { return energy_physical_estimate(f).value; }

namespace detail {

inline double slope_of(double w, double eps_cos) {
  const double c = std::cos(0.5 * w);
  if (std::abs(c) <= eps_cos) return std::sin(w) >= 0.0 ? std::numeric_limits<double>::infinity()
                                                        : -std::numeric_limits<double>::infinity();
  return std::tan(0.5 * w);
}

}  // namespace detail

/// Evaluates u(t, x) = u(T, Z) where x = x(T, Z) on the requested grid.
///
/// Each target is located by binary search on x(T, .). Inside a cell u is
/// linear in x and u_x interpolates tan(w/2); across a flat cell (characteristics
/// collapsed to one point) u takes its left value. A cell carrying a singular
/// characteristic is split where that characteristic sits in x, estimated from
/// one-sided limits of x_Z, and each side takes the slope of its own end. Targets beyond the outermost
/// characteristics get u = 0 (the datum has decayed there).
inline PhysicalField to_physical(const CharState& s, const UniformGrid& grid, double eps_cos = 1e-6) {
  const std::size_t n = s.size();
  for (std::size_t i = 1; i < n; ++i)
    if (s.x[i] < s.x[i - 1]) throw NonMonotoneX(i, s.T);

  PhysicalField f;
  f.t = s.T;
  f.x = grid;
  f.u.assign(grid.size, 0.0);
  f.ux.assign(grid.size, 0.0);
  f.valid.assign(grid.size, 1);
  const double flat_tol = 1e-14 * std::max(1.0, s.x.back() - s.x.front());
  for (std::size_t i = 0; i + 1 < n;) {
    std::size_t j = i;
    while (j + 1 < n && s.x[j + 1] - s.x[j] <= flat_tol) ++j;
    if (j > i) f.flat_segment_jump = std::max(f.flat_segment_jump, std::abs(s.u[j] - s.u[i]));
    i = j + 1;
  }

  // Cells holding a singular characteristic: fraction of the cell's x-width on
  // the left of it (from one-sided limits of x_Z = v cos^2(w/2)) and u there.
  std::map<std::size_t, std::pair<double, double>> kink_split;
  if (!s.singular_Z.empty()) {
    const auto rho = metric_density(s);
    for (const auto& sp : singular_points(s)) {
      const auto pl = detail::primitive_left(s, sp), pr = detail::primitive_right(s, sp);
      const double rl = detail::metric_jet(pl).value, rr = detail::metric_jet(pr).value;
      const double wl = sp.theta * (rho[sp.cell] + rl), wr = (1.0 - sp.theta) * (rho[sp.cell + 1] + rr);
      const double phi = wl + wr > 0.0 ? wl / (wl + wr) : sp.theta;
      const double u_c = 0.5 * (pl.u.value + pr.u.value);
      kink_split[sp.cell] = {phi, u_c};
    }
  }

  for (std::size_t k = 0; k < grid.size; ++k) {
    const double xq = grid[k];
    if (xq < s.x.front() || xq > s.x.back()) continue;
    auto it = std::upper_bound(s.x.begin(), s.x.end(), xq);
    std::size_t i = it == s.x.end() ? n - 2 : static_cast<std::size_t>(it - s.x.begin()) - 1;
    i = std::min(i, n - 2);
    const double dx = s.x[i + 1] - s.x[i];
    if (dx <= flat_tol) {
      std::size_t j = i;
      while (j > 0 && s.x[j] - s.x[j - 1] <= flat_tol) --j;
      f.u[k] = s.u[j];
      f.ux[k] = std::copysign(std::numeric_limits<double>::infinity(), std::sin(s.w[i]));
      f.valid[k] = 0;
      continue;
    }
    const double t = (xq - s.x[i]) / dx;
    f.u[k] = s.u[i] + t * (s.u[i + 1] - s.u[i]);

    const double sl = detail::slope_of(s.w[i], eps_cos);
    const double sr = detail::slope_of(s.w[i + 1], eps_cos);
    if (!std::isfinite(sl) || !std::isfinite(sr)) {
      f.valid[k] = 0;
      f.ux[k] = !std::isfinite(sl) ? sl : sr;
      continue;
    }
    if (auto split = kink_split.find(i); split != kink_split.end()) {
      const auto [phi, u_c] = split->second;
      if (t <= phi) {
        f.u[k] = phi > 0.0 ? s.u[i] + (t / phi) * (u_c - s.u[i]) : u_c;
        f.ux[k] = sl;
      } else {
        f.u[k] = u_c + ((t - phi) / (1.0 - phi)) * (s.u[i + 1] - u_c);
        f.ux[k] = sr;
      }
    } else {
      f.ux[k] = sl + t * (sr - sl);
    }
  }
  f.energy = energy_physical(f);
  return f;
}

/// Largest |u(x) - u(y)| / (sqrt(E0) |x - y|^{1/2}) over all grid pairs at
/// dyadic separations 1, 2, 4, ... cells.
inline double holder_check(const PhysicalField& f, double E0) {
  if (!(E0 > 0.0)) return 0.0;
  const double scale = std::sqrt(E0);
  double worst = 0.0;
  for (std::size_t sep = 1; sep < f.x.size; sep *= 2) {
    const double denom = scale * std::sqrt(static_cast<double>(sep) * f.x.step);
    for (std::size_t i = 0; i + sep < f.x.size; ++i) worst = std::max(worst, std::abs(f.u[i + sep] - f.u[i]) / denom);
  }
  return worst;
}

}  // namespace charflow
