#pragma once

#include <stdexcept>

namespace crq {

/// A numerical breakdown: failed factorization, non-finite values, violated assembly check.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace crq
