#pragma once

#include <stdexcept>
#include <string>

namespace fujita {

// Thrown when an argument lies outside the mathematical domain of an
// operation: wrong exponent regime, malformed bracket, invalid config value.
// Maps to process exit code 2 in the command line driver.
class domain_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when an algorithm fails numerically: step size underflow, loss of
// positivity, quadrature that refuses to converge, inconclusive shooting.
// Maps to process exit code 3 in the command line driver.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fujita
