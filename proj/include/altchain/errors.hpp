#pragma once

#include <stdexcept>
#include <string>

namespace altchain {

/// Argument outside the mathematical domain of an operation (zeta at s <= 1,
/// odd N, m-window below p1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A documented precondition on the physical input failed, e.g. a
/// non-neutral triple with a non-summable component or a collapsed gap.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iterative method did not reach its tolerance within the allowed budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed JSON or unknown keys in an input document.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No registered convex split exists for a potential kind.
class DecompositionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace altchain
