#pragma once

#include <stdexcept>
#include <string>

namespace cchaos {

/// Inputs of incompatible order, dimension, or bidegree.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A degree or size bound of the exact machinery was exceeded.
struct BudgetExceeded : std::length_error {
  using std::length_error::length_error;
};

/// A floating factorisation failed its residual certificate.
struct IllConditioned : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed text input (tensor files, oracle expressions, configs).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cchaos
