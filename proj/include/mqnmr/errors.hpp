#pragma once

#include <stdexcept>
#include <string>

namespace mqnmr {

/// Invalid physical input, e.g. an (N, S) pair that does not label a sector.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller broke a precondition between two valid values (mismatched sizes, missing sectors).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Eigensolver or quadrature failed to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; the message carries line and field context.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mqnmr
