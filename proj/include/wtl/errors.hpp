#pragma once

#include <stdexcept>
#include <string>

namespace wtl {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unsupported family/rank, malformed parameters, bad CLI configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Arguments outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// An enumeration guard was exceeded.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Malformed textual input.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A kernel that should be one-dimensional was not.
class ReducibilityError : public Error {
 public:
  using Error::Error;
};

// Something that the theory guarantees did not hold.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace wtl
