#pragma once

#include <stdexcept>
#include <string>

namespace viscogrid {

/// Invalid argument: mismatched levels, out-of-range parameters.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Mesh construction refused (degenerate or inconsistent topology).
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values, failed factorization, loss of definiteness.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Line search was handed a non-descent direction.
class AscentDirectionError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// Backtracking could not find a step satisfying sufficient decrease.
class LineSearchFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace viscogrid
