#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace specboot {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Empty or mismatched matrix/vector shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A parameter outside its documented range (k > p, alpha outside (0,1), ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// All-zero spectrum, zero trace and similar inputs with nothing to measure.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// A transformation applied outside its domain, e.g. log of a zero eigenvalue.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Partial standardization with tau > 0 hit a zero bootstrap scale.
class DegenerateScaleError : public Error {
 public:
  DegenerateScaleError(const std::string& what, std::vector<std::size_t> indices)
      : Error(what), indices_(std::move(indices)) {}

  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

/// Malformed input file; line() is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace specboot
