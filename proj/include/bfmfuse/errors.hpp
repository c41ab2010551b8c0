#pragma once

#include <stdexcept>
#include <string>

namespace bfmfuse {

/// Input data or configuration failed a contract check.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Array length / source-count mismatch, as opposed to an axiom violation.
class StructuralError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Write attempted on the empty set or the full set.
class PinnedElementError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A request exceeds a hard cap (enumeration size, source count).
class CapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bfmfuse
