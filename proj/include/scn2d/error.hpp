#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scn2d {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf in an input or result.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A candidate node whose activation vector has (numerically) zero energy.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or stream (IDX, CSV, model container).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Model stream parse failure; carries the byte offset where parsing stopped.
class ParseError : public FormatError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : FormatError(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Two inputs that must agree (e.g. image and label counts) do not.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace scn2d
