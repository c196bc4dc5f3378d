#pragma once

#include <stdexcept>
#include <string>

namespace pgg {

// Invalid input, bad configuration or failed I/O. The CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical breakdown: singular systems, divergence, non-finite iterates.
// The CLI maps this to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pgg
