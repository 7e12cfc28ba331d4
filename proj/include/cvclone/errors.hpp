#pragma once

#include <stdexcept>
#include <string>

namespace cvclone {

/// Raised when an operation receives arguments outside its domain
/// (bad mode index, non-positive variance, mismatched dimensions, ...).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Raised when a computed result breaks a physical invariant, e.g. a
/// covariance matrix that violates the uncertainty relation.
class InvariantViolation : public std::runtime_error {
  public:
    InvariantViolation(std::string invariant, const std::string &detail)
        : std::runtime_error(invariant + ": " + detail), invariant_(std::move(invariant)) {}

    const std::string &invariant() const noexcept { return invariant_; }

  private:
    std::string invariant_;
};

} // namespace cvclone
