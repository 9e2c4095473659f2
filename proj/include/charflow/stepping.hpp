#pragma once

#include <concepts>
#include <optional>
#include <type_traits>
#include <utility>

namespace charflow {

/// A state type the classical four-stage Runge-Kutta core can advance.
/// `advanced(y, h, d)` returns y + h d (including any clock the state carries)
/// and `rk4_combine(k1, k2, k3, k4)` returns (k1 + 2 k2 + 2 k3 + k4) / 6.
template <class State, class Deriv>
concept RungeKuttaState = requires(const State& y, double h, const Deriv& d) {
  { advanced(y, h, d) } -> std::convertible_to<State>;
  { rk4_combine(d, d, d, d) } -> std::convertible_to<Deriv>;
};

/// One classical RK4 step. `k1`, when supplied, must equal f(y).
template <class State, class Rhs, class Deriv = std::invoke_result_t<Rhs&, const State&>>
  requires RungeKuttaState<State, Deriv>
State rk4_step(const State& y, double h, Rhs&& f, std::optional<Deriv> k1 = std::nullopt) {
  if (!k1) k1 = f(y);
  const Deriv k2 = f(advanced(y, 0.5 * h, *k1));
  const Deriv k3 = f(advanced(y, 0.5 * h, k2));
  const Deriv k4 = f(advanced(y, h, k3));
  return advanced(y, h, rk4_combine(*k1, k2, k3, k4));
}

}  // namespace charflow
