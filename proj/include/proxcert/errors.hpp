#pragma once

#include <stdexcept>
#include <string>

namespace proxcert {

enum class ErrorCode {
  invalid_argument,
  shape,
  io,
  parse,
  theorem_range,
  numerical,
};

/// Base exception for everything the library throws. The code maps 1:1 onto
/// the C API status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCode::invalid_argument, what) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(ErrorCode::shape, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorCode::parse, what) {}
};

// A rate theorem was asked about a step size outside its hypothesis.
class TheoremRangeError : public Error {
 public:
  explicit TheoremRangeError(const std::string& what)
      : Error(ErrorCode::theorem_range, what) {}
};

}  // namespace proxcert
