#pragma once

#include <stdexcept>
#include <string>

namespace keygraph {

/// Raised when an argument violates a documented precondition or type invariant.
class precondition_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// No key-ring size satisfies the connectivity threshold inequality.
class no_threshold_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A scaling schedule cannot reach its target constant within tolerance.
class infeasible_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Exhaustive enumeration would exceed the configured iteration budget.
class budget_exceeded_error : public std::length_error {
 public:
  using std::length_error::length_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) {
    throw precondition_error(message);
  }
}

}  // namespace detail
}  // namespace keygraph
