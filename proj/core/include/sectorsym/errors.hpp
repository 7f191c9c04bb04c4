#pragma once

#include <stdexcept>
#include <string>

namespace sectorsym {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- geometry ---

// A direction angle does not lie on the angular lattice of the grid.
class AxisNotGridAligned : public Error {
public:
  using Error::Error;
};

// Requested symmetry order is incompatible with the grid resolution.
class IncompatibleSymmetry : public Error {
public:
  using Error::Error;
};

// Node mask does not match between operands.
class MaskMismatch : public Error {
public:
  using Error::Error;
};

// --- numerics ---

// Argument outside the safe range of an exponential evaluation.
class Overflow : public Error {
public:
  using Error::Error;
};

// An iterative computation failed to reach its tolerance.
class ConvergenceFailure : public Error {
public:
  ConvergenceFailure(const std::string& msg, double achieved)
      : Error(msg), achieved_residual(achieved) {}
  double achieved_residual = 0.0;
};

// Bracketing for a 1-D root search failed.
class NoBracket : public Error {
public:
  using Error::Error;
};

// Newton line search failed repeatedly.
class Diverged : public Error {
public:
  using Error::Error;
};

// Inner linear solve broke down (signals a bifurcation point).
class SingularJacobian : public Error {
public:
  using Error::Error;
};

// One sign component of a nodal iterate degenerated to zero.
class CollapsedSign : public Error {
public:
  using Error::Error;
};

// --- symmetry / diagnostics ---

// A field expected to be invariant under the k-fold rotation is not.
class NotKInvariant : public Error {
public:
  using Error::Error;
};

// A diagnostic precondition on the Morse index is not met.
class IndexMismatch : public Error {
public:
  using Error::Error;
};

// An eigenfunction overlap integral expected positive is not.
class NonpositiveOverlap : public Error {
public:
  using Error::Error;
};

// --- configuration and I/O ---

// Invalid scenario configuration; message carries the offending key path.
class ConfigError : public Error {
public:
  using Error::Error;
};

// Malformed persisted field header or metadata mismatch.
class FormatError : public Error {
public:
  using Error::Error;
};

// Binary payload shorter than the declared element count.
class TruncatedPayload : public Error {
public:
  using Error::Error;
};

// Operating-system level I/O failure.
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace sectorsym
