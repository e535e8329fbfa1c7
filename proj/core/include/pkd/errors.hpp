#pragma once

#include <stdexcept>
#include <string>

namespace pkd {

/// Argument outside the documented domain of a numerical routine.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Two bit strings (or a bit string and a matrix) have incompatible lengths.
class LengthMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced a value that contradicts an analytic invariant.
class NumericFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid user-supplied configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace pkd
