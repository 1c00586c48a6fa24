#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracgrowth {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the documented range of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid construction data (curve, crack, domain, integrand, config).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Nesting or sharing preconditions between two cracks do not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A constructed object (e.g. an extended perturbation) violates an invariant.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// Crack sample escapes the closed domain.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Rasterization depth too coarse for the grid step.
class CouplingError : public Error {
 public:
  using Error::Error;
};

/// A point list is not a contiguous prefix of a crack sample.
class RecognitionError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual, long iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  long iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  long iterations_;
};

/// Failure inside one incremental step; carries the step index.
class StepError : public Error {
 public:
  StepError(const std::string& what, std::size_t step) : Error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace fracgrowth
