#pragma once

#include <stdexcept>
#include <string>

namespace eulerfield {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Adaptive quadrature failed to reach the requested tolerance.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double last_estimate, double error_estimate)
      : std::runtime_error(what), last_estimate_(last_estimate), error_estimate_(error_estimate) {}

  double last_estimate() const noexcept { return last_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double last_estimate_;
  double error_estimate_;
};

/// Dense factorization or other linear-algebra failure.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grids that were required to share geometry do not.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent configuration input.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0) : std::runtime_error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace eulerfield
