#pragma once

#include <stdexcept>
#include <string>

namespace punn {

/// Base of every exception raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Header or column layout does not match the feature schema.
class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what) : Error("schema error: " + what) {}
};

/// A cell or a model file could not be parsed.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error("parse error: " + what) {}
};

/// Parsed values violate a data invariant (non-finite, out of range, empty set).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error("validation error: " + what) {}
};

/// A product unit received a non-positive input.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain error: " + what) {}
};

/// Evaluation overflowed or produced a non-finite value.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error("numeric error: " + what) {}
};

/// Model text carries a version tag this build does not understand.
class UnknownVersionError : public ParseError {
 public:
  explicit UnknownVersionError(const std::string& version)
      : ParseError("unknown model format version '" + version + "'"), version_(version) {}
  const std::string& version() const noexcept { return version_; }

 private:
  std::string version_;
};

/// Caller passed arguments outside an operation's contract.
class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error("invalid argument: " + what) {}
};

}  // namespace punn
