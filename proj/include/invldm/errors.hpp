#pragma once

#include <stdexcept>

namespace invldm {

/// Shapes or sizes that do not fit the operation.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A pivot, Schur complement or denominator that is zero to working precision.
class SingularError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that breaks a structural precondition (non-Hermitian, non-positive).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace invldm
