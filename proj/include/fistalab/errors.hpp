#pragma once

#include <stdexcept>
#include <string>

namespace fistalab {

// Invalid user-supplied configuration. The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem or serialization failure. The CLI maps this to exit code 3.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite values or a broken numeric contract encountered mid-run.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fistalab
