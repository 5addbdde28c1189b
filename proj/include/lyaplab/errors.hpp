#pragma once

#include <stdexcept>
#include <string>

namespace lyaplab {

// Base for every error raised by the library. Subclasses map onto the
// failure categories the CLI turns into exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: out-of-range arguments, malformed specs, invalid files.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Configuration mismatches between otherwise valid objects.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Non-finite values, overflow, degenerate Möbius results.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A geodesic starts on (or grazes) the side it is tested against.
class TangencyError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Ray tracing kept hitting vertices, bending curve is parabolic, etc.
class DegenerateError : public NumericError {
 public:
  using NumericError::NumericError;
};

class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

// ODE step size underflow.
class StiffnessError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Too few successful Monte-Carlo samples to form an estimate.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class ResourceError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lyaplab
