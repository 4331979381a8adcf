#pragma once

#include <stdexcept>
#include <string>

namespace unitroot {

/// Inconsistent matrix dimensions in an input.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Input outside the domain of the operation (non-SPD covariance, bad node
/// count, identically singular polynomial, ...).
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DegenerateInputError : InputError {
  using InputError::InputError;
};

/// A quantity was requested before the chain that defines it was built.
struct SequencingError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Pole order outside the supported range 0..4.
struct UnsupportedOrderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Contour passes too close to a root of det A(z).
struct ContourError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Quadrature or reconstruction failed to converge / is underdetermined.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace unitroot
