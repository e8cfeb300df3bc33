#pragma once

#include <stdexcept>
#include <string>

namespace fracwave {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Evaluation at a pole (e.g. Gamma at a non-positive integer).
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A series, quadrature or contour did not reach its tolerance within budget.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Direction set on which the anisotropic symbol vanishes.
class DegeneracyError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Spectral grid that does not resolve the propagator.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Local singularity r^exponent at the origin of a 3D kernel.
class SingularityError : public DomainError {
 public:
  SingularityError(const std::string& what, double exponent)
      : DomainError(what), exponent_(exponent) {}
  double exponent() const noexcept { return exponent_; }

 private:
  double exponent_;
};

/// Malformed input file or unreadable path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fracwave
