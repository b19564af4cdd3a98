#pragma once

#include <stdexcept>
#include <string>

namespace enacode {

/// Base class for every recoverable data or configuration problem. The CLI
/// maps these to exit status 2; anything else escaping is an internal error.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input does not have the expected columns, fields or code names.
class SchemaError : public Error {
public:
  using Error::Error;
};

/// A single input row is malformed. Carries the 1-based physical line.
class RowError : public Error {
public:
  RowError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

/// Two tables that must share entry ids do not.
class MergeError : public Error {
public:
  using Error::Error;
};

/// The numerical problem has no unique answer (identical group means, ...).
class DegenerateError : public Error {
public:
  using Error::Error;
};

/// A pipeline stage was invoked before the stage it depends on.
class StageError : public Error {
public:
  using Error::Error;
};

} // namespace enacode
