#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "charflow/char_state.hpp"
#include "charflow/errors.hpp"
#include "charflow/flux_model.hpp"
#include "charflow/numerics.hpp"

namespace charflow {

/// Nonlocal source terms P and P_x sampled on the Z-grid.
struct KernelResult {
  std::vector<double> P;
  std::vector<double> Px;
};

/// A characteristic label where the state has one-sided limits only (an
/// initial slope discontinuity), located at Z[cell] + theta * dZ.
struct SingularPoint {
  std::size_t cell = 0;
  double theta = 0.0;
};

/// Singular labels far enough from the grid ends for one-sided three-point
/// stencils on both sides.
inline std::vector<SingularPoint> singular_points(const CharState& state) {
  std::vector<SingularPoint> out;
  const std::size_t n = state.size();
  for (double zs : state.singular_Z) {
    if (!(zs >= state.Z.front() && zs <= state.Z.back())) continue;
    auto [k, theta] = state.Z.locate(zs);
    // A node sitting on the point holds the right-side values, so the point
    // closes the previous cell.
    if (theta == 0.0 && k > 0) {
      --k;
      theta = 1.0;
    }
    if (k < 3 || k + 4 > n) continue;
    out.push_back({k, theta});
  }
  return out;
}

namespace detail {

/// A value and its Z-derivative.
struct Jet {
  double value = 0.0;
  double slope = 0.0;
};

// Quadratic through three nodes on one side of a singular point, evaluated at
// it. `y(i)` returns the node value.
template <class F>
Jet left_jet(F&& y, const SingularPoint& sp, double h) {
  const std::size_t k = sp.cell;
  const double t = sp.theta;  // nodes at 0, -1, -2 relative to Z[k]
  const double a = y(k), b = y(k - 1), c = y(k - 2);
  return {(t + 1) * (t + 2) / 2 * a - t * (t + 2) * b + t * (t + 1) / 2 * c,
          ((2 * t + 3) / 2 * a - (2 * t + 2) * b + (2 * t + 1) / 2 * c) / h};
}

template <class F>
Jet right_jet(F&& y, const SingularPoint& sp, double h) {
  const std::size_t k = sp.cell + 1;
  const double p = sp.theta - 1.0;  // nodes at 0, 1, 2 relative to Z[k]
  const double a = y(k), b = y(k + 1), c = y(k + 2);
  return {(p - 1) * (p - 2) / 2 * a - p * (p - 2) * b + p * (p - 1) / 2 * c,
          ((2 * p - 3) / 2 * a - (2 * p - 2) * b + (2 * p - 1) / 2 * c) / h};
}

inline Jet left_limit(std::span<const double> y, const SingularPoint& sp, double h) {
  return left_jet([&](std::size_t i) { return y[i]; }, sp, h);
}

inline Jet right_limit(std::span<const double> y, const SingularPoint& sp, double h) {
  return right_jet([&](std::size_t i) { return y[i]; }, sp, h);
}

/// u, w and log v with their Z-derivatives. Densities built from these by the
/// chain rule stay accurate where v itself grows exponentially along Z.
struct PrimitiveJet {
  Jet u, w, lv;
};

inline PrimitiveJet primitive_left(const CharState& s, const SingularPoint& sp) {
  const double h = s.Z.step;
  return {left_limit(s.u, sp, h), left_limit(s.w, sp, h),
          left_jet([&](std::size_t i) { return std::log(s.v[i]); }, sp, h)};
}

inline PrimitiveJet primitive_right(const CharState& s, const SingularPoint& sp) {
  const double h = s.Z.step;
  return {right_limit(s.u, sp, h), right_limit(s.w, sp, h),
          right_jet([&](std::size_t i) { return std::log(s.v[i]); }, sp, h)};
}

// Jet of G(u, w) v from G, G_u and G_w at the primitive values.
inline Jet density_jet(const PrimitiveJet& p, double G, double G_u, double G_w) {
  const double v = std::exp(p.lv.value);
  const double value = G * v;
  return {value, v * (G_u * p.u.slope + G_w * p.w.slope) + value * p.lv.slope};
}

/// rho = v cos^2(w/2).
inline Jet metric_jet(const PrimitiveJet& p) {
  const double w = p.w.value;
  return density_jet(p, cos2_half(w), 0.0, -0.5 * std::sin(w));
}

/// e = (u^2 cos^2(w/2) + sin^2(w/2)) v.
inline Jet energy_jet(const PrimitiveJet& p) {
  const double u = p.u.value, w = p.w.value, c2 = cos2_half(w);
  return density_jet(p, u * u * c2 + (1.0 - c2), 2.0 * u * c2, 0.5 * (1.0 - u * u) * std::sin(w));
}

/// q = (g(u) cos^2(w/2) + f''(u)/2 sin^2(w/2)) v.
inline Jet source_jet(const PrimitiveJet& p, const FluxModel& m) {
  const double u = p.u.value, w = p.w.value, c2 = cos2_half(w), s2 = 1.0 - c2;
  return density_jet(p, m.g(u) * c2 + 0.5 * m.f2(u) * s2, m.g1(u) * c2 + 0.5 * m.f3(u) * s2,
                     0.5 * (0.5 * m.f2(u) - m.g(u)) * std::sin(w));
}

}  // namespace detail

/// Second-order d/dZ: centred differences, switching to one-sided three-point
/// stencils wherever the centred stencil would straddle a singular point.
inline std::vector<double> derivative_z(std::span<const double> y, double h, std::span<const SingularPoint> sing) {
  const std::size_t n = y.size();
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h);
  d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h);
  for (const auto& sp : sing) {
    const std::size_t k = sp.cell;
    d[k] = (3.0 * y[k] - 4.0 * y[k - 1] + y[k - 2]) / (2.0 * h);
    d[k + 1] = (-3.0 * y[k + 1] + 4.0 * y[k + 2] - y[k + 3]) / (2.0 * h);
  }
  return d;
}

namespace detail {

/// Primitive jets at every node, slopes from derivative_z.
inline std::vector<PrimitiveJet> node_jets(const CharState& s, std::span<const SingularPoint> sing) {
  const std::size_t n = s.size();
  std::vector<double> lv(n);
  for (std::size_t i = 0; i < n; ++i) lv[i] = std::log(s.v[i]);
  const double h = s.Z.step;
  const auto du = derivative_z(s.u, h, sing), dw = derivative_z(s.w, h, sing), dlv = derivative_z(lv, h, sing);
  std::vector<PrimitiveJet> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {{s.u[i], du[i]}, {s.w[i], dw[i]}, {lv[i], dlv[i]}};
  return out;
}

}  // namespace detail

/// s(Z) = int_{Z0}^{Z} v cos^2(w/2): the physical distance between characteristics.
struct MetricAccumulator {
  std::vector<double> s;
};

inline std::vector<double> metric_density(const CharState& state) {
  std::vector<double> rho(state.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = state.v[i] * cos2_half(state.w[i]);
  return rho;
}

/// Plain cumulative trapezoid rule; non-decreasing because the density is >= 0.
inline MetricAccumulator cumulative_metric(const CharState& state) {
  return {cumulative_trapezoid(metric_density(state), state.Z.step)};
}

namespace detail {

// Trapezoid-minus-exact error of a kink (slope jump J) and a step (jump D)
// located theta cells into a cell: J h^2 (theta(1-theta)/2 - 1/12) + D h (theta - 1/2).
inline double kink_error(double J, double D, double theta, double h) {
  return J * h * h * (0.5 * theta * (1.0 - theta) - 1.0 / 12.0) + D * h * (theta - 0.5);
}

}  // namespace detail

/// Cumulative metric with Euler-Maclaurin end corrections, fourth-order for
/// piecewise-smooth states: the smooth part loses -(h^2/12) rho_Z and each
/// singular point's kink/step error is removed downstream of it.
inline MetricAccumulator corrected_metric(const CharState& state, std::span<const SingularPoint> sing) {
  const double h = state.Z.step;
  const auto rho = metric_density(state);
  auto s = cumulative_trapezoid(rho, h);
  const auto jets = detail::node_jets(state, sing);
  const double drho0 = detail::metric_jet(jets[0]).slope;
  for (std::size_t i = 0; i < s.size(); ++i) s[i] -= h * h / 12.0 * (detail::metric_jet(jets[i]).slope - drho0);
  for (const auto& sp : sing) {
    const auto l = detail::metric_jet(detail::primitive_left(state, sp));
    const auto r = detail::metric_jet(detail::primitive_right(state, sp));
    const double err = detail::kink_error(r.slope - l.slope, r.value - l.value, sp.theta, h);
    for (std::size_t i = sp.cell + 1; i < s.size(); ++i) s[i] -= err;
  }
  return {std::move(s)};
}

/// Exponential-kernel sums over point masses m_j at positions s_j:
///
///   P_i  = 1/2 sum_j        m_j exp(-|s_i - s_j|)
///   Px_i = 1/2 sum_{j != i} sign(j - i) m_j exp(-|s_i - s_j|)
///
/// in O(N) via a left-to-right and a right-to-left damped scan. The self term
/// enters P once and Px not at all. The scan assumes s non-decreasing; pairs
/// that are locally out of order (the corrected metric can dip on rough
/// states) are patched afterwards, at a cost proportional to their number.
inline KernelResult exponential_convolution(std::span<const double> s, std::span<const double> mass) {
  const std::size_t n = s.size();
  if (mass.size() != n) throw std::invalid_argument("exponential_convolution: size mismatch");
  KernelResult r{std::vector<double>(n), std::vector<double>(n)};
  if (n == 0) return r;

  std::vector<double> damp(n, 0.0);  // damp[i] = exp(-(s_i - s_{i-1}))
  for (std::size_t i = 1; i < n; ++i) damp[i] = std::exp(-(s[i] - s[i - 1]));

  std::vector<double> left(n), right(n);
  left[0] = mass[0];
  for (std::size_t i = 1; i < n; ++i) left[i] = left[i - 1] * damp[i] + mass[i];
  right[n - 1] = mass[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) right[i] = right[i + 1] * damp[i + 1] + mass[i];

  for (std::size_t i = 0; i < n; ++i) {
    r.P[i] = 0.5 * (left[i] + right[i] - mass[i]);
    r.Px[i] = 0.5 * (right[i] - left[i]);
  }

  std::vector<double> prefix_max(n), suffix_min(n);
  prefix_max[0] = s[0];
  for (std::size_t i = 1; i < n; ++i) prefix_max[i] = std::max(prefix_max[i - 1], s[i]);
  suffix_min[n - 1] = s[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) suffix_min[i] = std::min(suffix_min[i + 1], s[i]);
  for (std::size_t i = 0; i < n; ++i) {
    // The scan used exp(+d) where the kernel wants exp(-d).
    for (std::size_t j = i; j-- > 0 && prefix_max[j] > s[i];) {
      if (s[j] <= s[i]) continue;
      const double d = s[j] - s[i], fix = 0.5 * mass[j] * (std::exp(-d) - std::exp(d));
      r.P[i] += fix;
      r.Px[i] -= fix;
    }
    for (std::size_t j = i + 1; j < n && suffix_min[j] < s[i]; ++j) {
      if (s[j] >= s[i]) continue;
      const double d = s[i] - s[j], fix = 0.5 * mass[j] * (std::exp(-d) - std::exp(d));
      r.P[i] += fix;
      r.Px[i] += fix;
    }
  }
  return r;
}

namespace detail {

inline void require_finite(const KernelResult& k, double T) {
  for (double p : k.P)
    if (!std::isfinite(p)) throw StepBlowUp("P", T);
  for (double p : k.Px)
    if (!std::isfinite(p)) throw StepBlowUp("Px", T);
}

}  // namespace detail

/// Integrand of the characteristic-coordinate source term (per unit Z):
/// q = [g(u) cos^2(w/2) + f''(u)/2 sin^2(w/2)] v.
inline std::vector<double> source_density(const CharState& state, const FluxModel& model) {
  std::vector<double> q(state.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double u = state.u[i];
    q[i] = (model.g(u) * cos2_half(state.w[i]) + 0.5 * model.f2(u) * sin2_half(state.w[i])) * state.v[i];
  }
  return q;
}

/// P and P_x in characteristic coordinates.
///
/// Trapezoid rule in Z on the corrected metric, summed by the O(N) scan, then
/// the Euler-Maclaurin corrections for the kernel's own kink at Z' = Z
/// (P: -(h^2/12) s_Z q, P_x: +(h^2/12) q_Z) and for the kinks and steps the
/// integrand carries across singular characteristics.
inline KernelResult source_terms(const CharState& state, const FluxModel& model) {
  const double h = state.Z.step;
  const std::size_t n = state.size();
  const auto sing = singular_points(state);
  const auto metric = corrected_metric(state, sing);
  const auto q = source_density(state, model);
  const auto wts = trapezoid_weights(n, h);
  std::vector<double> mass(n);
  for (std::size_t i = 0; i < n; ++i) mass[i] = wts[i] * q[i];
  auto k = exponential_convolution(metric.s, mass);

  const auto rho = metric_density(state);
  const auto jets = detail::node_jets(state, sing);
  for (std::size_t i = 0; i < n; ++i) {
    k.P[i] -= h * h / 12.0 * rho[i] * q[i];
    k.Px[i] += h * h / 12.0 * detail::source_jet(jets[i], model).slope;
  }
  for (const auto& sp : sing) {
    const auto pl = detail::primitive_left(state, sp), pr = detail::primitive_right(state, sp);
    const auto ql = detail::source_jet(pl, model), qr = detail::source_jet(pr, model);
    const auto rl = detail::metric_jet(pl), rr = detail::metric_jet(pr);
    const double jump_q = qr.value - ql.value;
    const double jump_dq = qr.slope - ql.slope;
    const double jump_rq = rr.value * qr.value - rl.value * ql.value;
    // Position of the singular point on the metric: trapezoid over the partial
    // cell, averaged from both sides.
    const double sc = 0.5 * (metric.s[sp.cell] + 0.5 * sp.theta * h * (rho[sp.cell] + rl.value) +
                             metric.s[sp.cell + 1] - 0.5 * (1.0 - sp.theta) * h * (rho[sp.cell + 1] + rr.value));
    for (std::size_t i = 0; i < n; ++i) {
      const bool right_of = i > sp.cell;
      const double E = 0.5 * std::exp(-std::abs(metric.s[i] - sc));
      const double sigma = right_of ? 1.0 : -1.0;  // side of node i relative to the point
      const double tau = -sigma;                    // sign of (Z_c - Z_i) in the P_x kernel
      k.P[i] -= detail::kink_error(E * (sigma * jump_rq + jump_dq), E * jump_q, sp.theta, h);
      k.Px[i] -= detail::kink_error(E * (-jump_rq + tau * jump_dq), tau * E * jump_q, sp.theta, h);
    }
  }
  detail::require_finite(k, state.T);
  return k;
}

/// P and P_x on a uniform x-grid from u and u_x, integrand g(u) + f''(u) u_x^2 / 2.
/// Trapezoid rule plus the same kernel-kink correction as in Z (with s_x = 1).
inline KernelResult source_terms_physical(std::span<const double> u, std::span<const double> ux, const UniformGrid& x,
                                          const FluxModel& model) {
  if (u.size() != x.size || ux.size() != x.size) throw std::invalid_argument("source_terms_physical: size mismatch");
  if (x.size < 3) throw std::invalid_argument("source_terms_physical: need at least 3 points");
  const double h = x.step;
  const auto wts = trapezoid_weights(x.size, h);
  std::vector<double> q(x.size), mass(x.size);
  for (std::size_t i = 0; i < x.size; ++i) {
    q[i] = model.g(u[i]) + 0.5 * model.f2(u[i]) * ux[i] * ux[i];
    mass[i] = wts[i] * q[i];
  }
  auto k = exponential_convolution(x.points(), mass);
  const auto dq = derivative_z(q, h, {});
  for (std::size_t i = 0; i < x.size; ++i) {
    k.P[i] -= h * h / 12.0 * q[i];
    k.Px[i] += h * h / 12.0 * dq[i];
  }
  detail::require_finite(k, 0.0);
  return k;
}

/// Closed-form L1 norms of the kernel decay envelopes used in the a-priori
/// estimates: Lambda (local existence) and Gamma (global bound).
struct KernelBounds {
  double lambda_l1 = 0.0;  // 2 mu^2 + 4 / v_minus
  double gamma_l1 = 0.0;   // 4 (Ebar + 1) / v_minus
  bool state_within_v_range = true;
};

inline KernelBounds kernel_bound_report(double mu, double v_minus, double Ebar) {
  if (!(v_minus > 0.0)) throw std::invalid_argument("kernel_bound_report: v_minus must be positive");
  return {2.0 * mu * mu + 4.0 / v_minus, 4.0 * (Ebar + 1.0) / v_minus, true};
}

/// Same closed forms, plus whether the state's v actually lies in [v_minus, v_plus].
inline KernelBounds kernel_bound_report(const CharState& state, double mu, double v_minus, double v_plus, double Ebar) {
  KernelBounds b = kernel_bound_report(mu, v_minus, Ebar);
  for (double v : state.v)
    if (v < v_minus || v > v_plus) b.state_within_v_range = false;
  return b;
}

}  // namespace charflow
