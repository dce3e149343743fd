#pragma once

#include <stdexcept>
#include <string>

namespace redex {

/// Base of every error thrown by the library. `kind()` is a stable identifier
/// used by the CLI to pick exit codes and by tests to match error classes.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what) : Error("InvalidInput", what) {}
};

class DimError : public Error {
 public:
  explicit DimError(const std::string& what) : Error("DimError", what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("ConfigError", what) {}
};

class SingularSystem : public Error {
 public:
  explicit SingularSystem(const std::string& what) : Error("SingularSystem", what) {}
};

class DegenerateLayer : public Error {
 public:
  DegenerateLayer(int layer, const std::string& what)
      : Error("DegenerateLayer", "layer " + std::to_string(layer) + ": " + what), layer_(layer) {}
  int layer() const noexcept { return layer_; }

 private:
  int layer_;
};

/// Netlist syntax or structure error. `line()` is 1-based, 0 when the error is
/// not tied to a single line (e.g. a missing `out` statement).
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Thrown when an iterative solver runs out of iterations. Solvers that can
/// return a best iterate instead report `converged = false`; this exception is
/// reserved for callers that asked for strict convergence.
class SolverBudgetExceeded : public Error {
 public:
  SolverBudgetExceeded(const std::string& what, double best_value)
      : Error("SolverBudgetExceeded", what), best_value_(best_value) {}
  double best_value() const noexcept { return best_value_; }

 private:
  double best_value_;
};

}  // namespace redex
