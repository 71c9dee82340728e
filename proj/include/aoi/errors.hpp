#pragma once

#include <stdexcept>
#include <string>

namespace aoi {

// Invalid scenario or parameter input supplied from outside the library.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation that should succeed for valid inputs did not (singular
// system, non-finite intermediate, no active sensor).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aoi
