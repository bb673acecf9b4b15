#pragma once

#include <stdexcept>
#include <string>

namespace summon {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on arguments was violated (bad index, dimension mismatch).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input enumeration or Hilbert space size exceeds the configured cap.
class CapacityExceeded : public Error {
 public:
  using Error::Error;
};

/// A datum was consumed at a point outside the causal future of its emission.
class CausalityViolation : public Error {
 public:
  using Error::Error;
};

/// The requested (N, d) secret sharing construction is not available.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// Quantum protocol synthesis refused the task (impossible, constrained, ...).
class SynthesisRefused : public Error {
 public:
  using Error::Error;
};

/// The protocol reached an inconsistent state during execution.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// A plan's delivery decisions depend on measurement outcomes.
class NotDeterministic : public Error {
 public:
  using Error::Error;
};

/// A task or trace file could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace summon
