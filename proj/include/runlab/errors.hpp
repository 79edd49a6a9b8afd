#pragma once

#include <stdexcept>
#include <string>

namespace runlab {

/// Base of every error thrown by the library. `exit_code()` is the CLI status
/// the error maps to.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const { return 2; }
};

class OutOfRange : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 64; }
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 64; }
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}
  explicit ParseError(const std::string& what) : Error(what) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  int exit_code() const override { return 64; }

 private:
  std::size_t line_ = 0;
  std::size_t column_ = 0;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 4; }
};

/// The speed has bounded n / phi(n) on the searched range, so the set of
/// extreme divergence points is empty (r_n <= n).
class EmptinessBranch : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 3; }
};

/// A comparison could not be certified with the available interval precision.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

class Undecidable : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

class InvalidSchedule : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 64; }
};

}  // namespace runlab
