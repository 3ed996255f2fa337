#pragma once

#include <stdexcept>
#include <string>

namespace convexeff {

// Malformed or missing input data (files, priors, configuration).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A query or argument that violates an operation's precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An iterative solver failed to meet its stopping criterion.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace convexeff
