#pragma once

#include <stdexcept>
#include <string>

namespace simlb {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: malformed config, impossible placement, mismatched sweeps.
// The CLI maps these to exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class PlacementFailure : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class MismatchedSweeps : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// A broken simulation invariant. The CLI maps these to exit code 2.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class SchedulingInPast : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

class InsufficientResources : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

class ThresholdExceeded : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

class UnknownTask : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

class OutOfBounds : public Error {
 public:
  using Error::Error;
};

class EmptyRecordSet : public Error {
 public:
  using Error::Error;
};

class NoTasksForDc : public Error {
 public:
  using Error::Error;
};

class DegenerateDifferences : public Error {
 public:
  using Error::Error;
};

class ZeroBaseline : public Error {
 public:
  using Error::Error;
};

}  // namespace simlb
