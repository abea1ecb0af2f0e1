#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace semijoin {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text; line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " at line " + std::to_string(line) + ", column " +
              std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Well-formed input that violates a static rule: unknown relation, arity
// mismatch, dialect violation, unguarded quantifier and the like.
class CheckError : public Error {
 public:
  using Error::Error;
};

// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Raised when an internal cross-check fails.  Seeing one means a bug.
class InternalError : public Error {
 public:
  using Error::Error;
};

namespace detail {

// Converts a byte offset into a 1-based (line, column) pair.
inline std::pair<std::size_t, std::size_t> line_column(const std::string& text,
                                                       std::size_t offset) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace detail
}  // namespace semijoin
