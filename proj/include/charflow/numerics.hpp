#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace charflow {

/// Uniform 1-D grid of `size` points from `start` to `stop`. The upper half is
/// indexed from `stop`, so a grid symmetric about 0 is mirror-exact in floating
/// point.
struct UniformGrid {
  double start = 0.0;
  double step = 1.0;
  std::size_t size = 0;
  double stop = 0.0;

  UniformGrid() = default;
  UniformGrid(double first, double h, std::size_t n)
      : start(first), step(h), size(n), stop(n ? first + static_cast<double>(n - 1) * h : first) {}

  static UniformGrid spanning(double lo, double hi, std::size_t n) {
    if (n < 2 || !(hi > lo)) throw std::invalid_argument("UniformGrid::spanning needs n >= 2 and hi > lo");
    UniformGrid g(lo, (hi - lo) / static_cast<double>(n - 1), n);
    g.stop = hi;
    return g;
  }

  double operator[](std::size_t i) const {
    if (2 * i + 1 == size) return 0.5 * (start + stop);
    if (2 * i < size) return start + static_cast<double>(i) * step;
    return stop - static_cast<double>(size - 1 - i) * step;
  }
  double front() const { return start; }
  double back() const { return stop; }

  /// Fractional index of x: returns (cell, theta) with x = grid[cell] + theta * step,
  /// measured from the nearer end.
  std::pair<std::size_t, double> locate(double x) const {
    const double mid = 0.5 * (start + stop);
    if (x <= mid) {
      const double r = (x - start) / step;
      const double k = std::floor(r);
      return {static_cast<std::size_t>(std::max(k, 0.0)), r - k};
    }
    const double r = (stop - x) / step;
    const double k = std::floor(r);
    const double theta = r - k;
    if (theta == 0.0) return {size - 1 - static_cast<std::size_t>(k), 0.0};
    return {size - 2 - static_cast<std::size_t>(k), 1.0 - theta};
  }

  std::vector<double> points() const {
    std::vector<double> p(size);
    for (std::size_t i = 0; i < size; ++i) p[i] = (*this)[i];
    return p;
  }
};

inline double trapezoid(std::span<const double> y, double h) {
  if (y.size() < 2) return 0.0;
  double acc = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) acc += y[i];
  return acc * h;
}

/// Trapezoid weights on a uniform grid of n points.
inline std::vector<double> trapezoid_weights(std::size_t n, double h) {
  std::vector<double> wts(n, h);
  if (n > 0) {
    wts.front() *= 0.5;
    wts.back() *= 0.5;
  }
  return wts;
}

/// Running trapezoid integral, out[0] = 0.
inline std::vector<double> cumulative_trapezoid(std::span<const double> y, double h) {
  std::vector<double> out(y.size(), 0.0);
  for (std::size_t i = 1; i < y.size(); ++i) out[i] = out[i - 1] + 0.5 * h * (y[i - 1] + y[i]);
  return out;
}

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Carlson slopes).
/// Monotone data give a monotone interpolant; evaluation outside the knot range
/// clamps to the end values.
class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> xs, std::vector<double> ys) : x_(std::move(xs)), y_(std::move(ys)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw std::invalid_argument("MonotoneCubic needs >= 2 matching knots");
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      if (!(h[i] > 0.0)) throw std::invalid_argument("MonotoneCubic knots must be strictly increasing");
      delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    d_.assign(n, 0.0);
    if (n == 2) {
      d_[0] = d_[1] = delta[0];
      return;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) continue;
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
    d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }

  double operator()(double x) const {
    if (x <= x_.front()) return y_.front();
    if (x >= x_.back()) return y_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
  }

 private:
  static double end_slope(double h0, double h1, double del0, double del1) {
    double d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if (d * del0 <= 0.0) return 0.0;
    if (del0 * del1 <= 0.0 && std::abs(d) > std::abs(3.0 * del0)) return 3.0 * del0;
    return d;
  }

  std::vector<double> x_, y_, d_;
};

/// Fourth-order first derivative on a uniform grid; one-sided fourth-order
/// stencils on the two outermost points at each end.
inline std::vector<double> derivative4(std::span<const double> y, double h) {
  const std::size_t n = y.size();
  if (n < 5) throw std::invalid_argument("derivative4 needs at least 5 points");
  std::vector<double> d(n);
  for (std::size_t i = 2; i + 2 < n; ++i) d[i] = (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * h);
  d[0] = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) / (12.0 * h);
  d[1] = (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]) / (12.0 * h);
  d[n - 1] = (25.0 * y[n - 1] - 48.0 * y[n - 2] + 36.0 * y[n - 3] - 16.0 * y[n - 4] + 3.0 * y[n - 5]) / (12.0 * h);
  d[n - 2] = (3.0 * y[n - 1] + 10.0 * y[n - 2] - 18.0 * y[n - 3] + 6.0 * y[n - 4] - y[n - 5]) / (12.0 * h);
  return d;
}

inline double max_abs(std::span<const double> y) {
  double m = 0.0;
  for (double v : y) m = std::max(m, std::abs(v));
  return m;
}

/// log2(coarse / fine); the observed order of a quantity that shrinks under halving.
inline double observed_order(double coarse, double fine) { return std::log2(coarse / fine); }

}  // namespace charflow
