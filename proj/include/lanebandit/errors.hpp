#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lanebandit {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidContextError : public Error {
 public:
  using Error::Error;
};

class InvalidRewardError : public Error {
 public:
  using Error::Error;
};

/// A forward pass produced a non-finite intermediate value.
class NumericOverflowError : public Error {
 public:
  using Error::Error;
};

/// A training step produced non-finite parameters.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t epoch, const std::string& what)
      : Error(what), epoch_(epoch) {}
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

/// Malformed model or profile file. `field()` names the first offending field.
class SchemaError : public Error {
 public:
  SchemaError(std::string field, const std::string& what)
      : Error(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class UnsupportedVersionError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

/// CSV parse failure; line numbers are 1-based and count the header.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Input data does not satisfy an operation's preconditions (too small, empty, mismatched keys).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace lanebandit
