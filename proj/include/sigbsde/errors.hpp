#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sigbsde {

/// Operands disagree on alphabet size, depth, or matrix dimensions.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition on the inputs does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A forward simulation produced a non-finite state.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, int step) : std::runtime_error(what), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

/// The backward solver produced non-finite Y or Z values.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int step, std::size_t bad_samples)
      : std::runtime_error(what), step_(step), bad_samples_(bad_samples) {}
  int step() const noexcept { return step_; }
  std::size_t bad_samples() const noexcept { return bad_samples_; }

 private:
  int step_;
  std::size_t bad_samples_;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sigbsde
