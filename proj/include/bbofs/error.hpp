#pragma once

#include <stdexcept>
#include <string>

namespace bbofs {

/// Malformed or inconsistent input data (ingestion, validation, bad indices).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A solver stopped before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bbofs
