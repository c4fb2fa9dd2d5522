#pragma once

#include <stdexcept>
#include <string>

namespace stlaws {

// Violated precondition or malformed input. The CLI maps this to exit code 2.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Quadrature non-convergence, overflow, or a failed internal consistency
// check. The CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stlaws
