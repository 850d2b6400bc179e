#pragma once

#include <stdexcept>
#include <string>

namespace entangle {

/// Input outside the physical or mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Second moments that violate <q^2><p^2> >= hbar^2/4, or an (x, y) pair with xy < 1.
class UncertaintyViolation : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A numerical procedure could not reach its requested accuracy.
class ToleranceError : public std::runtime_error {
 public:
  ToleranceError(std::string quantity, double measured, double tolerance)
      : std::runtime_error(quantity + ": error estimate " + std::to_string(measured) +
                           " exceeds tolerance " + std::to_string(tolerance)),
        quantity_(std::move(quantity)),
        measured_(measured),
        tolerance_(tolerance) {}

  const std::string& quantity() const noexcept { return quantity_; }
  double measured() const noexcept { return measured_; }
  double tolerance() const noexcept { return tolerance_; }

 private:
  std::string quantity_;
  double measured_;
  double tolerance_;
};

}  // namespace entangle
