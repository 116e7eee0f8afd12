#pragma once

#include <stdexcept>

namespace dco {

/// A computation produced a non-finite or otherwise unusable number.
/// Precondition violations use std::invalid_argument instead.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dco
