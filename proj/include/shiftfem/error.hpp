#pragma once

#include <stdexcept>
#include <string>

namespace shiftfem {

/// Invalid user-facing configuration: bad parameters, unknown names, violated
/// preconditions on ε, N, σ. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure of a solve (singular system, residual check failed).
/// Maps to CLI exit code 1.
class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, double pivot)
      : std::runtime_error(what), pivot_(pivot) {}

  double pivot() const noexcept { return pivot_; }

private:
  double pivot_;
};

/// Evaluation point outside the declared domain of a function.
class DomainError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

}  // namespace shiftfem
