#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "charflow/char_state.hpp"
#include "charflow/flux_model.hpp"
#include "charflow/kernel.hpp"
#include "charflow/numerics.hpp"

namespace charflow {

/// Time derivatives of the characteristic state.
struct StateDerivative {
  std::vector<double> du, dw, dv, dx;
};

/// Right-hand side of the semi-linear system
///   u_T = -P_x
///   w_T = 2 (g(u) - P) cos^2(w/2) - f''(u) sin^2(w/2)
///   v_T = (g(u) - P + f''(u)/2) v sin w
///   x_T = f'(u)
/// `kernel_out`, when given, receives the P and P_x used.
inline StateDerivative rhs(const CharState& state, const FluxModel& model, KernelResult* kernel_out = nullptr) {
  KernelResult k = source_terms(state, model);
  const std::size_t n = state.size();
  StateDerivative d{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double u = state.u[i], w = state.w[i];
    const double g = model.g(u), f2 = model.f2(u), P = k.P[i];
    d.du[i] = -k.Px[i];
    d.dw[i] = 2.0 * (g - P) * cos2_half(w) - f2 * sin2_half(w);
    d.dv[i] = (g - P + 0.5 * f2) * state.v[i] * std::sin(w);
    d.dx[i] = model.f1(u);
  }
  if (kernel_out) *kernel_out = std::move(k);
  return d;
}

/// Slope of u against x in each Z-cell, du/dx = (u_{i+1}-u_i)/(x_{i+1}-x_i).
/// Cells containing a singular label are split at the label: each side
/// inherits the slope of its neighbouring cell. Cells thinner than `min_dx`
/// are reported as zero-width (weight 0).
struct CellSlopes {
  std::vector<double> slope;
  std::vector<double> width;
};

inline CellSlopes cell_slopes(const CharState& s, double min_dx) {
  const std::size_t n = s.size();
  CellSlopes c{std::vector<double>(n - 1, 0.0), std::vector<double>(n - 1, 0.0)};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dx = s.x[i + 1] - s.x[i];
    if (dx > min_dx) {
      c.slope[i] = (s.u[i + 1] - s.u[i]) / dx;
      c.width[i] = dx;
    }
  }
  return c;
}

/// Norm of the solution space: ||u||_H1 + ||w||_L2 + ||w||_Linf + ||v||_Linf.
///
/// ||u||_H1 is taken in physical space, u_x = u_Z / x_Z from Z-differences on
/// cells wider than eps_x * dZ. A cell holding a singular characteristic is
/// integrated as two pieces with the one-sided slopes of its neighbours.
inline double norm_X(const CharState& s, double eps_x = 1e-12) {
  const std::size_t n = s.size();
  const double h = s.Z.step;
  const CellSlopes c = cell_slopes(s, eps_x * h);
  double h1sq = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dx = s.x[i + 1] - s.x[i];
    h1sq += 0.5 * dx * (s.u[i] * s.u[i] + s.u[i + 1] * s.u[i + 1]);
    if (c.width[i] == 0.0) continue;
    if (!s.singular_Z.empty() && s.touches_singular(i, i + 1) && i > 0 && i + 2 < n) {
      const double zs = *std::find_if(s.singular_Z.begin(), s.singular_Z.end(),
                                      [&](double z) { return z >= s.Z[i] && z <= s.Z[i + 1]; });
      const double theta = (zs - s.Z[i]) / h;
      h1sq += c.slope[i - 1] * c.slope[i - 1] * theta * dx + c.slope[i + 1] * c.slope[i + 1] * (1.0 - theta) * dx;
    } else {
      h1sq += c.slope[i] * c.slope[i] * dx;
    }
  }
  std::vector<double> w2(n);
  for (std::size_t i = 0; i < n; ++i) w2[i] = s.w[i] * s.w[i];
  const double w_l2 = std::sqrt(trapezoid(w2, h));
  const double w_inf = max_abs(s.w);
  const double v_inf = max_abs(s.v);
  return std::sqrt(h1sq) + w_l2 + w_inf + v_inf;
}

}  // namespace charflow
