#pragma once

#include <stdexcept>
#include <string>

namespace miwave {

/// Bad input to an operation: nonpositive sizes, mismatched grids, values out of domain.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative solver did not reach its tolerance within the iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Water-filling would put infinite energy in a bin (zero channel PSD with positive numerator).
class UnboundedAllocation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The requested target cannot be met inside the admissible region.
class InfeasibleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace miwave
