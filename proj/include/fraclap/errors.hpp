#ifndef FRACLAP_ERRORS_HPP
#define FRACLAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fraclap {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

// Gamma-type pole hit exactly (nonpositive integer argument).
struct PoleError : DomainError {
  using DomainError::DomainError;
};

// A series or adaptive scheme failed its own residual check.
struct ConvergenceError : Error {
  using Error::Error;
};

// Node budget exhausted before the requested tolerance was met.
struct BudgetExceededError : ConvergenceError {
  using ConvergenceError::ConvergenceError;
};

// An integral that provably diverges for the given parameters.
struct DivergenceError : DomainError {
  using DomainError::DomainError;
};

// Operation undefined in the current (n,s) regime.
struct RegimeError : DomainError {
  using DomainError::DomainError;
};

// Evaluation requested exactly at a singular point of a kernel or map.
struct SingularityError : DomainError {
  using DomainError::DomainError;
};

// Green-function evaluation on (or numerically at) the diagonal x == z.
struct DiagonalSingularityError : SingularityError {
  using SingularityError::SingularityError;
};

// Integrand produced NaN/Inf at an interior quadrature node.
struct NonFiniteSampleError : Error {
  using Error::Error;
};

// Two independent closed-form routes disagreed beyond tolerance.
struct ConsistencyError : Error {
  using Error::Error;
};

}  // namespace fraclap

#endif
