#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "charflow/errors.hpp"
#include "charflow/numerics.hpp"

namespace charflow {

/// Initial profile sampled on a strictly increasing x-grid.
///
/// `kinks` lists the x-positions where the slope is discontinuous (peakon
/// crests); samples taken exactly at a kink carry the average of the one-sided
/// slopes. When the profile has a closed form, `u_exact`/`ux_exact` let the
/// characteristic transform evaluate it directly instead of interpolating.
struct InitialDatum {
  std::vector<double> x;
  std::vector<double> u;
  std::vector<double> ux;
  std::vector<double> kinks;
  std::function<double(double)> u_exact;
  std::function<double(double)> ux_exact;

  std::size_t size() const { return x.size(); }

  void validate(double decay_tol = 1e-10) const {
    if (x.size() < 3) throw DatumError("initial datum needs at least 3 samples");
    if (u.size() != x.size() || ux.size() != x.size()) throw DatumError("initial datum arrays differ in length");
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!std::isfinite(x[i]) || !std::isfinite(u[i]) || !std::isfinite(ux[i]))
        throw DatumError("initial datum contains non-finite samples");
      if (i > 0 && !(x[i] > x[i - 1])) throw DatumError("initial datum x-samples must be strictly increasing");
    }
    for (std::size_t i : {std::size_t{0}, x.size() - 1}) {
      if (std::abs(u[i]) > decay_tol || std::abs(ux[i]) > decay_tol)
        throw DatumError("initial datum does not decay at the truncation boundary x=" + std::to_string(x[i]));
    }
  }
};

/// Solution of the semi-linear system at one time T on a uniform Z-grid.
///
/// w is carried unwrapped; only cos and sin of w/2 enter the physics.
/// `singular_Z` holds the labels of characteristics that started at a kink of
/// the initial profile. Z labels are constant in time, so the list never changes.
struct CharState {
  double T = 0.0;
  UniformGrid Z;
  std::vector<double> u;
  std::vector<double> w;
  std::vector<double> v;
  std::vector<double> x;
  std::vector<double> singular_Z;

  std::size_t size() const { return Z.size; }

  static CharState zero(const UniformGrid& grid) {
    CharState s;
    s.Z = grid;
    s.u.assign(grid.size, 0.0);
    s.w.assign(grid.size, 0.0);
    s.v.assign(grid.size, 1.0);
    s.x = grid.points();
    return s;
  }

  /// True when a singular label lies in the closed Z-interval [Z[i], Z[j]].
  bool touches_singular(std::size_t i, std::size_t j) const {
    const double lo = Z[i], hi = Z[j];
    for (double zs : singular_Z)
      if (zs >= lo && zs <= hi) return true;
    return false;
  }
};

inline double cos2_half(double w) {
  const double c = std::cos(0.5 * w);
  return c * c;
}

inline double sin2_half(double w) {
  const double s = std::sin(0.5 * w);
  return s * s;
}

/// Throws StepBlowUp on non-finite data and DatumError when v leaves (0, inf).
/// Monotonicity of x is asserted where it is relied on, in reconstruction.
inline void check_state(const CharState& s) {
  const std::size_t n = s.size();
  if (s.u.size() != n || s.w.size() != n || s.v.size() != n || s.x.size() != n)
    throw DatumError("CharState arrays do not match the grid size");
  auto finite = [&](const std::vector<double>& a, const char* name) {
    for (double val : a)
      if (!std::isfinite(val)) throw StepBlowUp(name, s.T);
  };
  finite(s.u, "u");
  finite(s.w, "w");
  finite(s.v, "v");
  finite(s.x, "x");
  for (std::size_t i = 0; i < n; ++i)
    if (!(s.v[i] > 0.0)) throw DatumError("v lost positivity at index " + std::to_string(i));
}

}  // namespace charflow
