#pragma once

#include <stdexcept>
#include <string>

namespace tailsum {

/// Base of all library errors. Config/validation problems and numerical
/// failures are distinguished so the CLI can map them to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class WrongRadialLaw : public Error {
 public:
  using Error::Error;
};

/// Numerical failures: a limit that does not exist or a quadrature that
/// could not reach its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NoFiniteLimit : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class QuadratureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tailsum
