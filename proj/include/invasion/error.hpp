#pragma once

#include <stdexcept>
#include <string>

namespace invasion {

/// Base class for every error raised by the solver library. `kind()` is a
/// short machine-readable tag used by the CLI error line.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

class IndexError : public Error {
public:
  explicit IndexError(const std::string& what) : Error("index", what) {}
};

class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

class DegenerateStateError : public Error {
public:
  explicit DegenerateStateError(const std::string& what)
      : Error("degenerate_state", what) {}
};

class InsufficientHistoryError : public Error {
public:
  explicit InsufficientHistoryError(const std::string& what)
      : Error("insufficient_history", what) {}
};

class StepSizeCollapseError : public Error {
public:
  explicit StepSizeCollapseError(const std::string& what)
      : Error("step_size_collapse", what) {}
};

class SolverFailureError : public Error {
public:
  explicit SolverFailureError(const std::string& what)
      : Error("solver_failure", what) {}
};

class IoError : public Error {
public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace invasion
