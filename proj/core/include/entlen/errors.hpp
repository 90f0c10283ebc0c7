#pragma once

#include <stdexcept>
#include <string>

namespace entlen {

// Precondition on an argument does not hold (bad support, non-Hermitian input,
// geometry mismatch, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A structural hypothesis of a construction does not hold (e.g. |B| < r).
class PreconditionError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Dense dimension exceeds the configured budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed model description or scan configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A check that holds mathematically failed numerically; signals a bug.
class InternalConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace entlen
