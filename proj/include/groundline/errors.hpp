#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace groundline {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GimbalLockError : public Error {
 public:
  GimbalLockError() : Error("euler decomposition at gimbal lock (|pitch| ~ 90 deg)") {}
};

class InvalidRotationError : public Error {
 public:
  using Error::Error;
};

class CovarianceSingularError : public Error {
 public:
  CovarianceSingularError() : Error("innovation covariance C + m*I is singular") {}
};

class AlreadyAbsoluteError : public Error {
 public:
  explicit AlreadyAbsoluteError(const std::string& what = "odometry sequence is already absolute")
      : Error(what) {}
};

class EmptySequenceError : public Error {
 public:
  EmptySequenceError() : Error("odometry sequence is empty") {}
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class LengthMismatchError : public Error {
 public:
  LengthMismatchError(std::size_t a, std::size_t b)
      : Error("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

/// Configuration rejected; `field()` names the offending entry.
class InvalidConfigError : public Error {
 public:
  InvalidConfigError(std::string field, const std::string& reason)
      : Error("invalid config field '" + field + "': " + reason), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class InvalidFactorError : public Error {
 public:
  explicit InvalidFactorError(long factor)
      : Error("downsampling factor must be >= 1, got " + std::to_string(factor)) {}
};

/// Malformed text input. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error("parse error at line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NonFiniteValueError : public ParseError {
 public:
  explicit NonFiniteValueError(std::size_t line) : ParseError(line, "non-finite value") {}
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace groundline
