#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rayleigh {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration outside the domain of a field (e.g. |q| at the elastic
/// pendulum singularity, rho <= 0 in cylindrical coordinates).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// d_q(p#, p#) evaluated below -1e-12; the dissipation field is not PSD.
class NegativeRateError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid construction data (non-symmetric mass matrix, bad tableau, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Failure inside the trajectory driver; carries the index of the step that
/// could not be taken.
class StepError : public Error {
 public:
  StepError(std::size_t step_index, const std::string& what)
      : Error("step " + std::to_string(step_index) + ": " + what),
        step_index_(step_index) {}

  std::size_t step_index() const noexcept { return step_index_; }

 private:
  std::size_t step_index_;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public SolverError {
 public:
  using SolverError::SolverError;
};

class DegenerateMomentum : public SolverError {
 public:
  using SolverError::SolverError;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace rayleigh
