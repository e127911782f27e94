#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fuvalkit {

/// Precondition of an operation violated by the caller (bad dimension, bad index).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent run configuration: missing reference, degenerate scaling, etc.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed LIBSVM input. `line()` is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Projection of w0 onto a halfspace whose normal vanishes while the constraint is violated.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The numeric minimization oracle failed to converge (unbounded or iteration cap).
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fuvalkit
