#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace n00n {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model or argument violates a documented invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The fringe normalization vanished; no probability vector exists.
class DegenerateModelError : public Error {
 public:
  using Error::Error;
};

/// An acquisition with zero total counts cannot be turned into frequencies.
class EmptyDataError : public Error {
 public:
  using Error::Error;
};

/// Dataset too small for the requested split or operation.
class DatasetSizeError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// The Fisher information is zero, so the Cramér–Rao bound is infinite.
class UnboundedCrbError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; carries the 1-based line number (0 when not line-specific).
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace n00n
