#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "charflow/char_state.hpp"
#include "charflow/numerics.hpp"

namespace charflow {

namespace detail {

// Quadratic extrapolation of the samples at i0, i1, i2 to position xq.
inline double extrapolate3(const std::vector<double>& xs, const std::vector<double>& ys, std::size_t i0, std::size_t i1,
                           std::size_t i2, double xq) {
  const double x0 = xs[i0], x1 = xs[i1], x2 = xs[i2];
  const double l0 = (xq - x1) * (xq - x2) / ((x0 - x1) * (x0 - x2));
  const double l1 = (xq - x0) * (xq - x2) / ((x1 - x0) * (x1 - x2));
  const double l2 = (xq - x0) * (xq - x1) / ((x2 - x0) * (x2 - x1));
  return l0 * ys[i0] + l1 * ys[i1] + l2 * ys[i2];
}

}  // namespace detail

/// Characteristic label of each sample: Z(x) = int_0^x (1 + u_x^2).
///
/// Cumulative trapezoid rule. Cells touching a kink are split at the kink and
/// each side uses its own one-sided slope limit (extrapolated from that side),
/// so the slope jump does not degrade the rule to first order.
inline std::vector<double> coordinate_of(const InitialDatum& datum) {
  const auto& x = datum.x;
  const auto& ux = datum.ux;
  const std::size_t n = x.size();
  auto density = [](double s) { return 1.0 + s * s; };

  std::vector<double> cell(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) cell[i] = 0.5 * (x[i + 1] - x[i]) * (density(ux[i]) + density(ux[i + 1]));

  const double tol = 1e-12 * std::max(std::abs(x.front()), std::abs(x.back()));
  for (double k : datum.kinks) {
    if (!(k > x.front() && k < x.back())) continue;
    const auto it = std::upper_bound(x.begin(), x.end(), k);
    std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;  // x[i] <= k < x[i+1]
    const bool on_left_sample = std::abs(x[i] - k) <= tol;
    const bool on_right_sample = std::abs(x[i + 1] - k) <= tol;
    if (on_right_sample) ++i;
    if (on_left_sample || on_right_sample) {
      // Kink sits on sample i: cells i-1 and i each take the one-sided limit.
      if (i >= 3) {
        const double left = detail::extrapolate3(x, ux, i - 1, i - 2, i - 3, x[i]);
        cell[i - 1] = 0.5 * (x[i] - x[i - 1]) * (density(ux[i - 1]) + density(left));
      }
      if (i + 3 < n) {
        const double right = detail::extrapolate3(x, ux, i + 1, i + 2, i + 3, x[i]);
        cell[i] = 0.5 * (x[i + 1] - x[i]) * (density(right) + density(ux[i + 1]));
      }
    } else if (i >= 2 && i + 3 < n) {
      const double left = detail::extrapolate3(x, ux, i, i - 1, i - 2, k);
      const double right = detail::extrapolate3(x, ux, i + 1, i + 2, i + 3, k);
      cell[i] = 0.5 * (k - x[i]) * (density(ux[i]) + density(left)) +
                0.5 * (x[i + 1] - k) * (density(right) + density(ux[i + 1]));
    }
  }

  std::vector<double> Z(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) Z[i] = Z[i - 1] + cell[i - 1];

  if (x.front() <= 0.0 && 0.0 <= x.back()) {
    const auto it = std::lower_bound(x.begin(), x.end(), 0.0);
    const std::size_t j = static_cast<std::size_t>(it - x.begin());
    double shift;
    if (x[j] == 0.0) {
      shift = Z[j];
    } else {
      const double t = (0.0 - x[j - 1]) / (x[j] - x[j - 1]);
      const double d0 = density(ux[j - 1]);
      const double dm = d0 + t * (density(ux[j]) - d0);
      shift = Z[j - 1] + 0.5 * (0.0 - x[j - 1]) * (d0 + dm);
    }
    for (double& z : Z) z -= shift;
  }
  return Z;
}

namespace detail {

// Z(x) = int_0^x (1 + u_x^2) from the exact slope evaluator: five-point
// Gauss-Legendre per datum cell, split at kinks, accumulated outward from 0 so
// that a mirror-symmetric datum gets mirror-exact labels.
class ExactLabel {
 public:
  explicit ExactLabel(const InitialDatum& d) : ux_(d.ux_exact), x_(d.x), kinks_(d.kinks) {
    std::sort(kinks_.begin(), kinks_.end());
    const std::size_t n = x_.size();
    Z_.assign(n, 0.0);
    first_pos_ = static_cast<std::size_t>(std::lower_bound(x_.begin(), x_.end(), 0.0) - x_.begin());
    for (std::size_t j = first_pos_; j < n; ++j)
      Z_[j] = (j == first_pos_) ? integral(0.0, x_[j]) : Z_[j - 1] + integral(x_[j - 1], x_[j]);
    for (std::size_t j = first_pos_; j-- > 0;)
      Z_[j] = (j + 1 == first_pos_) ? -integral(x_[j], 0.0) : Z_[j + 1] - integral(x_[j], x_[j + 1]);
  }

  double operator()(double x) const {
    if (x >= 0.0) {
      const auto it = std::upper_bound(x_.begin() + static_cast<std::ptrdiff_t>(first_pos_), x_.end(), x);
      const auto j = static_cast<std::size_t>(it - x_.begin());
      if (j == first_pos_) return integral(0.0, x);
      return Z_[j - 1] + integral(x_[j - 1], x);
    }
    const auto it = std::lower_bound(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(first_pos_), x);
    const auto j = static_cast<std::size_t>(it - x_.begin());
    if (j == first_pos_) return -integral(x, 0.0);
    return Z_[j] - integral(x, x_[j]);
  }

  double density(double x) const {
    const double g = ux_(x);
    return 1.0 + g * g;
  }

  /// x with Z(x) = z, bracketed by datum samples; Newton with bisection fallback.
  double inverse(double z) const {
    if (z <= Z_.front()) return x_.front();
    if (z >= Z_.back()) return x_.back();
    const auto it = std::upper_bound(Z_.begin(), Z_.end(), z);
    const std::size_t j = static_cast<std::size_t>(it - Z_.begin()) - 1;
    double lo = x_[j], hi = x_[j + 1];
    double x = lo + (hi - lo) * (z - Z_[j]) / (Z_[j + 1] - Z_[j]);
    for (int iter = 0; iter < 60; ++iter) {
      const double r = (*this)(x) - z;
      if (r > 0) hi = x; else lo = x;
      double next = x - r / density(x);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - x) <= 1e-15 * (1.0 + std::abs(x))) return next;
      x = next;
    }
    return x;
  }

 private:
  double gauss(double a, double b) const {
    static constexpr double xi1 = 0.5384693101056831, xi2 = 0.9061798459386640;
    static constexpr double w0 = 0.5688888888888889, w1 = 0.4786286704993665, w2 = 0.2369268850561891;
    const double m = 0.5 * (a + b), r = 0.5 * (b - a);
    // Paired nodes are summed first so that mirrored cells give identical results.
    const double acc = w0 * density(m) + w1 * (density(m - r * xi1) + density(m + r * xi1)) +
                       w2 * (density(m - r * xi2) + density(m + r * xi2));
    return r * acc;
  }

  // Integral over [a, b], a <= b, split at any kink strictly inside.
  double integral(double a, double b) const {
    if (a == b) return 0.0;
    double acc = 0.0, left = a;
    for (double k : kinks_)
      if (k > left && k < b) {
        acc += gauss(left, k);
        left = k;
      }
    return acc + gauss(left, b);
  }

  std::function<double(double)> ux_;
  std::vector<double> x_;
  std::vector<double> kinks_;
  std::vector<double> Z_;
  std::size_t first_pos_ = 0;  // first sample with x >= 0
};

}  // namespace detail

/// Initial characteristic state on a uniform Z-grid of n_Z points:
/// u = u0(xbar(Z)), w = 2 atan(u0_x(xbar(Z))), v = 1, x = xbar(Z).
inline CharState to_characteristic(const InitialDatum& datum, std::size_t n_Z) {
  if (n_Z < 16) throw DatumError("to_characteristic needs n_Z >= 16");
  if (datum.size() < 3) throw DatumError("initial datum needs at least 3 samples");
  CharState s;
  s.T = 0.0;
  s.u.resize(n_Z);
  s.w.resize(n_Z);
  s.v.assign(n_Z, 1.0);

  if (datum.u_exact && datum.ux_exact) {
    const detail::ExactLabel label(datum);
    s.Z = UniformGrid::spanning(label(datum.x.front()), label(datum.x.back()), n_Z);
    s.x.resize(n_Z);
    for (std::size_t i = 0; i < n_Z; ++i) s.x[i] = label.inverse(s.Z[i]);
    s.x.front() = datum.x.front();
    s.x.back() = datum.x.back();
    for (std::size_t i = 0; i < n_Z; ++i) {
      s.u[i] = datum.u_exact(s.x[i]);
      s.w[i] = 2.0 * std::atan(datum.ux_exact(s.x[i]));
    }
    for (double k : datum.kinks) {
      if (!(k > datum.x.front() && k < datum.x.back())) continue;
      s.singular_Z.push_back(label(k));
      // A node sitting on a kink carries the right-side limit, matching
      // singular_points, which closes the previous cell there.
      const auto [i, theta] = s.Z.locate(s.singular_Z.back());
      if (theta != 0.0) continue;
      s.x[i] = k;
      s.u[i] = datum.u_exact(k);
      s.w[i] = 2.0 * std::atan(datum.ux_exact(std::nextafter(k, INFINITY)));
    }
  } else {
    const std::vector<double> Zs = coordinate_of(datum);
    for (std::size_t i = 1; i < Zs.size(); ++i)
      if (!(Zs[i] > Zs[i - 1])) throw DatumError("characteristic coordinate is not strictly increasing");
    const MonotoneCubic xbar_of_Z(Zs, datum.x);
    const MonotoneCubic Z_of_x(datum.x, Zs);
    s.Z = UniformGrid::spanning(Zs.front(), Zs.back(), n_Z);
    s.x.resize(n_Z);
    for (std::size_t i = 0; i < n_Z; ++i) s.x[i] = xbar_of_Z(s.Z[i]);
    s.x.front() = datum.x.front();
    s.x.back() = datum.x.back();
    const MonotoneCubic u_of_x(datum.x, datum.u);
    const MonotoneCubic ux_of_x(datum.x, datum.ux);
    for (std::size_t i = 0; i < n_Z; ++i) {
      s.u[i] = u_of_x(s.x[i]);
      s.w[i] = 2.0 * std::atan(ux_of_x(s.x[i]));
    }
    for (double k : datum.kinks)
      if (k > datum.x.front() && k < datum.x.back()) s.singular_Z.push_back(Z_of_x(k));
    for (double zs : s.singular_Z) {
      const auto [i, theta] = s.Z.locate(zs);
      if (theta == 0.0 && i + 3 < n_Z) s.w[i] = 3.0 * s.w[i + 1] - 3.0 * s.w[i + 2] + s.w[i + 3];
    }
  }
  std::sort(s.singular_Z.begin(), s.singular_Z.end());
  return s;
}

}  // namespace charflow
