// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace homolab {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the inputs of an operation does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Bad configuration text. Carries the 1-based line number (0 when the
/// problem is not tied to a line, e.g. a missing required key).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A numerical procedure failed: factorization breakdown, stalled iteration,
/// eigensolver out of budget, incomplete spectrum.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace homolab
