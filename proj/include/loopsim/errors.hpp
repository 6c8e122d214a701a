#pragma once

#include <stdexcept>
#include <string>

namespace loopsim {

// Invalid scenario, game, or model configuration. The CLI maps this to
// exit code 1. The message carries the offending config path where known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A model produced a non-finite value or hit a degenerate numeric state.
// The CLI maps this to exit code 2. The message names entity and tick.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace loopsim
