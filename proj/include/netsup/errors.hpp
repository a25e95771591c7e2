#pragma once

#include <stdexcept>
#include <string>

namespace netsup {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation's documented precondition does not hold for its inputs
/// (e.g. L(spec) is not contained in L(plant)).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A composition or exploration exceeded its state budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or model reference.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// The plant admits an unbounded run of consecutive uncontrollable events.
class UncontrollableLoop : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// A structural assumption of a checker is violated
/// (e.g. a locally controllable event that is not locally observable).
class AssumptionViolation : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

}  // namespace netsup
