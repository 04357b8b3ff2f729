#pragma once

#include <stdexcept>
#include <string>

namespace uplab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition or domain restriction was violated by the caller.
class DomainError : public Error {
 public:
  using Error::Error;
};

// An iterative method (optimizer, adaptive quadrature, Monte Carlo) did not
// reach its requested accuracy.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Exponent triple outside 0 < q < 2 < p, 2 < n < 2(p-q)/(p-2).
class AdmissibilityError : public DomainError {
 public:
  AdmissibilityError(std::string failed_inequality, const std::string& what)
      : DomainError(what), failed_(std::move(failed_inequality)) {}
  const std::string& failed_inequality() const noexcept { return failed_; }

 private:
  std::string failed_;
};

}  // namespace uplab
