#pragma once

#include <stdexcept>
#include <string>

namespace holomet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point lies on or outside the domain it was supposed to be in.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Caller violated a documented precondition (bad sizes, non-unit input, x == y...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Requested combination is well-formed but not supported (e.g. support functionals for p = inf).
class UnsupportedError : public ContractError {
 public:
  using ContractError::ContractError;
};

/// Parameters break a structural invariant of the geodesic family.
class InvariantViolation : public ContractError {
 public:
  using ContractError::ContractError;
};

/// Parameters do not satisfy the admissibility constraints within the gate tolerance.
class InadmissibleParams : public ContractError {
 public:
  InadmissibleParams(const std::string& what, double scalar_residual, double vector_residual)
      : ContractError(what), scalar_residual_(scalar_residual), vector_residual_(vector_residual) {}

  double scalar_residual() const noexcept { return scalar_residual_; }
  double vector_residual() const noexcept { return vector_residual_; }

 private:
  double scalar_residual_;
  double vector_residual_;
};

/// A sampled function returned a non-finite value.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, double theta) : Error(what), theta_(theta) {}
  double theta() const noexcept { return theta_; }

 private:
  double theta_;
};

/// No multistart run reached the requested tolerance.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

/// Two independent estimates of the same quantity disagree beyond tolerance.
class PrecisionError : public Error {
 public:
  PrecisionError(const std::string& what, double gap) : Error(what), gap_(gap) {}
  double gap() const noexcept { return gap_; }

 private:
  double gap_;
};

}  // namespace holomet
