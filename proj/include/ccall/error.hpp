#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ccall {

// Base of every error raised by the library. The CLI maps all of these to
// exit status 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& message)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " +
              message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Program-level inconsistencies detected while loading (e.g. a predicate
// declared both table and bridge).
class LoadError : public Error {
 public:
  using Error::Error;
};

class TranslationError : public Error {
 public:
  using Error::Error;
};

class InstantiationError : public Error {
 public:
  using Error::Error;
};

class TypeError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class ExistenceError : public Error {
 public:
  using Error::Error;
};

// Step budget or iteration cap exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// A tabling invariant was violated: answer/2 on a completed table, completion
// with pending work, malformed continuation terms, and so on.
class InternalError : public Error {
 public:
  using Error::Error;
};

// The fixpoint oracle rejected a clause (not range-restricted).
class OracleError : public Error {
 public:
  using Error::Error;
};

}  // namespace ccall
