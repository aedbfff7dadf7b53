#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace collrf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejected input: bad parameters, malformed files, model/N mismatch.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ParseError : public InvalidInput {
 public:
  ParseError(const std::string& what, std::size_t line)
      : InvalidInput("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Linear-algebra failure (singular resolvent, missing or degenerate null space).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Line fitting or parameter inference could not produce a trustworthy answer.
class InferenceError : public Error {
 public:
  using Error::Error;
};

/// Three lines were found, but the sidebands are too broad for a single emitter.
class MergedRegimeError : public InferenceError {
 public:
  MergedRegimeError(const std::string& what, double excess_half_width)
      : InferenceError(what), excess_half_width_(excess_half_width) {}
  /// Fitted sideband half-width minus the single-emitter value 3/4 (units of gamma).
  double excess_half_width() const noexcept { return excess_half_width_; }
  /// Full-width excess; a rough, uncalibrated stand-in for delta.
  double delta_proxy() const noexcept { return 2.0 * excess_half_width_; }

 private:
  double excess_half_width_;
};

}  // namespace collrf
