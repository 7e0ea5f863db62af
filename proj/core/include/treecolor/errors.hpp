#pragma once

#include <stdexcept>
#include <string>

namespace treecolor {

// Bad arguments, malformed trees, violated preconditions.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// State space or matrix larger than the configured cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfeasiblePinning : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation (e.g. a reducible chain).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UnsupportedRegime : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An asserted inequality or identity was violated.
class VerificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace treecolor
