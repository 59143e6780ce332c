#pragma once

#include <stdexcept>

namespace pbrf {

// Error taxonomy mirrored by the CLI exit codes: data 2, config 3, numeric 4.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pbrf
