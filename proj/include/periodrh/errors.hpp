#pragma once

#include <stdexcept>
#include <string>

namespace periodrh {

/// Bad input: wrong weight, impossible vanishing order, empty vector, ...
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Too few stored coefficients (or digits) for the requested computation.
class InsufficientPrecision : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iteration failed to converge or a certification check failed.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Near-degenerate spectrum; retry at `suggested_precision` digits.
class PrecisionEscalation : public NumericalError {
 public:
  PrecisionEscalation(const std::string& what, int suggested_precision)
      : NumericalError(what), suggested_precision_(suggested_precision) {}
  int suggested_precision() const { return suggested_precision_; }

 private:
  int suggested_precision_;
};

/// Exhaustive enumeration larger than the configured budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace periodrh
