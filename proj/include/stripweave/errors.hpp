#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stripweave {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax or lexical error in expression / surface text. `offset` is the
/// byte offset into the original source.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation outside a function's domain (log of a negative number, point
/// outside the parameter rectangle, knot outside the knot range, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Degenerate geometry: rank-deficient Jacobian, non positive-definite metric.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A required input file (config, checkpoint) is missing or unreadable.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace stripweave
