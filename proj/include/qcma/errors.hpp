#pragma once

#include <stdexcept>
#include <string>

namespace qcma {

/// Register sizes out of range or mismatched between operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A real parameter outside the operation's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed input data (non-unit phases, unsorted profiles, bad witnesses).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace qcma
