#pragma once

#include <stdexcept>
#include <string>

namespace irsevo {

/// Scenario or configuration contract violated. Messages name the offending
/// field. Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or written. Maps to CLI exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An integration or iterative solve failed (blow-up, non-convergence).
/// Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace irsevo
