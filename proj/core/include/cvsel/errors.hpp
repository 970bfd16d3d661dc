#pragma once

#include <stdexcept>
#include <string>

namespace cvsel {

// Two failure families, split by who is at fault. InvalidInput means the caller
// handed us something malformed (bad dimensions, bad scheme parameters, bad
// config); the CLI maps it to exit code 2. ComputeError means the inputs were
// well-formed but the computation cannot proceed (singular Gram matrix, zero
// residual where a positive one is required); the CLI maps it to exit code 3.

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ComputeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class ModelSpaceError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class SchemeError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class DataError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class ConfigError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class SingularGramError : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

// Unknown-variance predictive needs strictly positive residual sums of squares.
class ZeroResidualError : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

// Too few observations for the requested model dimension.
class InsufficientDataError : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

// Every candidate model failed to evaluate, so no selection can be made.
class SelectionFailedError : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

}  // namespace cvsel
