#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace emgame {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration. Carries the source line when the
/// error was raised while reading a config document.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, std::optional<int> line = std::nullopt)
      : Error(line ? "line " + std::to_string(*line) + ": " + what : what), line_(line) {}

  std::optional<int> line() const { return line_; }

 private:
  std::optional<int> line_;
};

/// A division or logarithm would leave its domain (zero emission volume, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A characteristic function is missing one or more coalitions.
class IncompleteInputError : public Error {
 public:
  using Error::Error;
};

/// An iterative oracle solver ran out of iterations.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what + " (last residual " + std::to_string(last_residual) + ")"),
        residual_(last_residual) {}

  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace emgame
