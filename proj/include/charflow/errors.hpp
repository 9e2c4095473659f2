#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace charflow {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelError : Error {
  using Error::Error;
};

struct DatumError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

/// A state field became non-finite during integration.
struct StepBlowUp : Error {
  StepBlowUp(std::string field_name, double time)
      : Error("non-finite value in field '" + field_name + "' at T=" + std::to_string(time)),
        field(std::move(field_name)),
        T(time) {}
  std::string field;
  double T;
};

struct EnergyDriftExceeded : Error {
  EnergyDriftExceeded(double drift_value, std::size_t step_index, double time)
      : Error("relative energy drift " + std::to_string(drift_value) + " exceeded tolerance at step " +
              std::to_string(step_index) + " (T=" + std::to_string(time) + ")"),
        drift(drift_value),
        step(step_index),
        T(time) {}
  double drift;
  std::size_t step;
  double T;
};

/// The classical solver's slope grew past its validity threshold.
struct BreakingApproached : Error {
  BreakingApproached(double time, double sup)
      : Error("breaking approached at t=" + std::to_string(time) +
              " (sup|u_x|=" + std::to_string(sup) + ")"),
        t(time),
        sup_ux(sup) {}
  double t;
  double sup_ux;
};

struct NonMonotoneX : Error {
  NonMonotoneX(std::size_t at, double time)
      : Error("characteristic positions decrease at index " + std::to_string(at) +
              " (T=" + std::to_string(time) + ")"),
        index(at),
        T(time) {}
  std::size_t index;
  double T;
};

}  // namespace charflow
