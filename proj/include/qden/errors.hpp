#pragma once

#include <stdexcept>
#include <string>

namespace qden {

/// Invalid configuration: off-grid positions, empty teams, bad rates.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed input data: non-ACGT letters, corrupt files, empty samples.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a generation cannot fill its population within the attempt cap.
class StuckTrial : public std::runtime_error {
 public:
  explicit StuckTrial(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a trial keeps getting stuck after every allowed restart.
class StuckBudgetExceeded : public std::runtime_error {
 public:
  explicit StuckBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qden
