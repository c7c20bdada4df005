#pragma once

#include <stdexcept>
#include <string>

namespace thicknerve {

enum class ExitCode : int { ok = 0, config = 2, falsification = 3, numerical = 4 };

/// Invalid configuration or precondition violated by user input.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A checked bound or invariant of the construction failed on real data.
struct FalsificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Solver or arithmetic failure (step underflow, non-convergence, overflow).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input outside the domain of a geometric operation.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline ExitCode exit_code_of(const std::exception& e) {
  if (dynamic_cast<const FalsificationError*>(&e)) return ExitCode::falsification;
  if (dynamic_cast<const NumericalError*>(&e)) return ExitCode::numerical;
  return ExitCode::config;
}

}  // namespace thicknerve
