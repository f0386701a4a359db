#pragma once

#include <stdexcept>
#include <string>

namespace slicelab {

/// Raised when a parameter combination lies outside the range where a volume
/// formula or limit theorem is available.
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a numerical integration cannot reach its requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an exhaustive enumeration would exceed its size guard.
class EnumerationGuardError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace slicelab
