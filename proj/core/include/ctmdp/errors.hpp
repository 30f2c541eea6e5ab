#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ctmdp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries a 1-based source position when known.
class ParseError : public Error {
 public:
  ParseError(std::string origin, std::size_t line, std::size_t column, const std::string& message)
      : Error(format(origin, line, column, message)),
        origin_(std::move(origin)),
        line_(line),
        column_(column) {}

  const std::string& origin() const noexcept { return origin_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& origin, std::size_t line, std::size_t column,
                            const std::string& message) {
    std::string out = origin.empty() ? std::string("<input>") : origin;
    if (line > 0) {
      out += ":" + std::to_string(line);
      if (column > 0) out += ":" + std::to_string(column);
    }
    return out + ": " + message;
  }

  std::string origin_;
  std::size_t line_ = 0;
  std::size_t column_ = 0;
};

/// Well-formed input that violates a semantic or structural rule.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver did not reach the requested residual.
class NumericError : public Error {
 public:
  NumericError(const std::string& message, double residual)
      : Error(message + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace ctmdp
