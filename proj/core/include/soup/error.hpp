// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace soup {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid task configuration, label, or run option.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A request or response violates the scorer wire contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Transport failure talking to a scorer or encoder. Retrying may succeed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Mathematical precondition violated (zero vector, empty neighbor set, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed embedding cache file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Malformed dataset line. Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input with invalid content (e.g. out-of-range gold label).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Accuracy cannot be computed (missing prediction or gold label).
class EvaluationError : public Error {
 public:
  using Error::Error;
};

}  // namespace soup
