#pragma once

#include <stdexcept>
#include <string>

namespace hypergrowth {

// Base class for all library errors. The CLI maps subclasses to exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input could not be parsed (presentation files, words, ledgers).
struct ParseError : Error {
  using Error::Error;
};

// A precondition or exactness guard was violated. Operations refuse to
// compute values that truncation could distort.
struct GuardError : Error {
  using Error::Error;
};

// A resource limit was hit (ball memory budget, rule limits, iteration caps).
struct LimitError : Error {
  using Error::Error;
};

// A numeric routine was called outside its domain.
struct DomainError : Error {
  using Error::Error;
};

// An iterative numeric routine failed to converge within its cap.
struct ConvergenceError : Error {
  using Error::Error;
};

// The cone-type automaton detected elements with equal signatures but
// different transition behaviour; the lookahead R is too small.
struct SignatureCollisionError : Error {
  using Error::Error;
};

// A rewriting system without a confluence certificate was asked to produce
// certified normal forms.
struct NotConfluentError : Error {
  using Error::Error;
};

// Parameter window for a bound formula is violated (lists the failed
// conditions in the message).
struct ValidityError : Error {
  using Error::Error;
};

}  // namespace hypergrowth
