#pragma once

#include <stdexcept>
#include <string>

namespace gamepop {

// Bad input: malformed files, out-of-domain parameters, violated preconditions.
// The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: non-convergence, overshooting integrators, unusable
// tolerances. The CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gamepop
