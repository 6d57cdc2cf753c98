#pragma once

#include <stdexcept>
#include <string>

namespace blurreg {

/// Malformed input: bad config values, grids that violate sampling
/// assumptions, signals that break their invariants.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The scenario is outside the small-blur regime the matrix theory covers.
class RegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A built-in reproduction check did not match its expected value.
class ReproductionMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExitCode : int {
  kSuccess = 0,
  kValidation = 2,
  kRegime = 3,
  kMismatch = 4,
};

}  // namespace blurreg
