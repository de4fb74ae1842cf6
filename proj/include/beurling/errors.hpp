#pragma once

#include <stdexcept>
#include <string>

namespace beurling {

/// Violated precondition on an argument (negative exponent, off-circle point, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation could not reach its target: degree cap, rank loss, overflow.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unknown configuration key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace beurling
