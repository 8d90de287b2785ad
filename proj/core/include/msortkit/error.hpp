#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msk {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SourcePos {
  std::size_t line = 1;
  std::size_t column = 1;
};

/// Malformed input text. Carries the 1-based position of the offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, SourcePos pos)
      : Error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message),
        pos_(pos) {}

  SourcePos position() const { return pos_; }

 private:
  SourcePos pos_;
};

/// Ill-sorted term or formula, or a reference to an undeclared symbol.
class SortError : public Error {
 public:
  using Error::Error;
};

/// Signature construction problems: duplicates, undeclared sorts, split violations.
class SignatureError : public Error {
 public:
  using Error::Error;
};

/// Evaluation asked for a variable the assignment does not cover.
class EvalError : public Error {
 public:
  using Error::Error;
};

/// A configured enumeration or search cap was hit.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// Integer arithmetic left the range of std::uint64_t.
class OverflowError : public Error {
 public:
  using Error::Error;
};

}  // namespace msk
