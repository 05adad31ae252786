#pragma once

#include <stdexcept>
#include <string>

namespace ameans {

/// Argument outside the function's domain ([0,inf) additive, [1,inf) multiplicative).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed spec tree (invariant violation, bad node parameters).
struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sweep schedule invalid, or every window anchor was skipped at some theta.
struct ScheduleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An exponential change of variables would leave the representable range.
struct OverflowGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad JSON input.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ameans
