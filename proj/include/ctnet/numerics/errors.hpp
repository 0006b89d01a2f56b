#pragma once

#include <stdexcept>
#include <string>

namespace ctnet {

/// Tensor shapes do not conform to an operation's contract.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced or consumed a non-finite value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid model, training or pipeline configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data violates a pipeline precondition (too short, all missing, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A document (telemetry JSON, series CSV, checkpoint) could not be parsed.
class ParseError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace ctnet
