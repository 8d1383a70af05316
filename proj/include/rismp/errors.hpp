#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rismp {

/// Base class of every exception thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A matrix that must be inverted during a Z<->S conversion has no inverse.
/// `pivot` is the elimination step at which the factorization broke down.
struct SingularMatrixError : Error {
  SingularMatrixError(const std::string& what, std::ptrdiff_t pivot_index)
      : Error(what), pivot(pivot_index) {}
  std::ptrdiff_t pivot;
};

/// Input matrix does not have the block structure an operation requires.
struct StructureError : Error {
  using Error::Error;
};

/// Invalid link geometry or configuration (non-positive distance, bad counts).
struct GeometryError : Error {
  using Error::Error;
};

/// A reflection coefficient of exactly 1 has no finite reactance.
struct OpenCircuitError : Error {
  using Error::Error;
};

/// Path-loss normalization is impossible (zero reference hop impedance).
struct NormalizationError : Error {
  using Error::Error;
};

/// An exhaustive search would exceed the configured cell budget.
struct BudgetError : Error {
  using Error::Error;
};

/// A computation produced NaN or Inf where a finite value is required.
struct NonFiniteError : Error {
  using Error::Error;
};

/// Malformed scenario or multiport block file.
struct ParseError : Error {
  ParseError(const std::string& what, long line_number)
      : Error(what + " (line " + std::to_string(line_number) + ")"),
        line(line_number) {}
  long line;
};

}  // namespace rismp
