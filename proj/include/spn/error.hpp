#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace spn {

// Root of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Turtle syntax error with a 1-based source location.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column),
        message_(message) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

// SPARQL syntax error; position is a byte offset into the query text.
class QueryParseError : public Error {
 public:
  QueryParseError(std::size_t position, const std::string& message)
      : Error("query offset " + std::to_string(position) + ": " + message),
        position_(position),
        message_(message) {}

  std::size_t position() const { return position_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t position_;
  std::string message_;
};

class UnknownPrefixError : public Error {
 public:
  explicit UnknownPrefixError(const std::string& prefix)
      : Error("unknown prefix '" + prefix + ":'"), prefix_(prefix) {}
  const std::string& prefix() const { return prefix_; }

 private:
  std::string prefix_;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

class TypeError : public Error {
 public:
  using Error::Error;
};

struct Diagnostic {
  std::string node;
  std::string message;
};

// Aggregates every problem found while loading a model.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Diagnostic> diagnostics)
      : Error(summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  static std::string summarize(const std::vector<Diagnostic>& diagnostics) {
    std::string out = std::to_string(diagnostics.size()) + " validation error(s)";
    for (const auto& d : diagnostics) {
      out += "\n  " + d.node + ": " + d.message;
    }
    return out;
  }

  std::vector<Diagnostic> diagnostics_;
};

// Runtime and analysis errors.
class ColorViolation : public Error {
 public:
  ColorViolation(const std::string& place, const std::string& token)
      : Error("token " + token + " rejected by the color rule of " + place), place_(place), token_(token) {}
  const std::string& place() const { return place_; }
  const std::string& token() const { return token_; }

 private:
  std::string place_;
  std::string token_;
};

class StaleBindingError : public Error {
 public:
  using Error::Error;
};

class DuplicateTokenError : public Error {
 public:
  using Error::Error;
};

class UnboundArgError : public Error {
 public:
  using Error::Error;
};

class TickLimitExceeded : public Error {
 public:
  using Error::Error;
};

class NonInternalizableError : public Error {
 public:
  using Error::Error;
};

class VocabBoundExceeded : public Error {
 public:
  using Error::Error;
};

class UnfoldLimitExceeded : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

}  // namespace spn
