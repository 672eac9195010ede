#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace symcert {

/// Base class for every failure raised by the library. The CLI maps any
/// `Error` escaping a subcommand to exit code 2 (invalid input).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------- groups

class NoIdentity : public Error {
 public:
  NoIdentity() : Error("table has no two-sided identity element") {}
};

class NotAssociative : public Error {
 public:
  NotAssociative(std::size_t x, std::size_t y, std::size_t z)
      : Error("associativity fails for (" + std::to_string(x) + ", " + std::to_string(y) + ", " +
              std::to_string(z) + ")"),
        x(x), y(y), z(z) {}
  std::size_t x, y, z;
};

class NotInvertible : public Error {
 public:
  enum class Line { Row, Column };
  NotInvertible(Line line, std::size_t index)
      : Error(std::string(line == Line::Row ? "row " : "column ") + std::to_string(index) +
              " is not a permutation"),
        line(line), index(index) {}
  Line line;
  std::size_t index;
};

class SizeGuardExceeded : public Error {
 public:
  SizeGuardExceeded(std::size_t size, std::size_t guard)
      : Error("size " + std::to_string(size) + " exceeds exhaustive-search guard " +
              std::to_string(guard)),
        size(size), guard(guard) {}
  std::size_t size, guard;
};

class NotASubgroup : public Error {
 public:
  using Error::Error;
};

class InvalidDecomposition : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------- actions

class IdentityAxiomViolated : public Error {
 public:
  explicit IdentityAxiomViolated(std::size_t point)
      : Error("identity moves point " + std::to_string(point)), point(point) {}
  std::size_t point;
};

class CompatibilityViolated : public Error {
 public:
  CompatibilityViolated(std::size_t g, std::size_t h, std::size_t point)
      : Error("(gh)x != g(hx) for g=" + std::to_string(g) + ", h=" + std::to_string(h) +
              ", x=" + std::to_string(point)),
        g(g), h(h), point(point) {}
  std::size_t g, h, point;
};

class ArityMismatch : public Error {
 public:
  ArityMismatch(std::size_t expected, std::size_t actual)
      : Error("expected " + std::to_string(expected) + " factors, got " + std::to_string(actual)),
        expected(expected), actual(actual) {}
  std::size_t expected, actual;
};

// ---------------------------------------------------------------- representations

class HomomorphismViolated : public Error {
 public:
  HomomorphismViolated(std::size_t g, std::size_t h, double residual)
      : Error("rho(gh) != rho(g)rho(h) for g=" + std::to_string(g) + ", h=" + std::to_string(h) +
              " (residual " + std::to_string(residual) + ")"),
        g(g), h(h), residual(residual) {}
  std::size_t g, h;
  double residual;
};

class IdentityNotMapped : public Error {
 public:
  explicit IdentityNotMapped(double residual)
      : Error("identity element is not mapped to the identity matrix (residual " +
              std::to_string(residual) + ")"),
        residual(residual) {}
  double residual;
};

class GroupMismatch : public Error {
 public:
  using Error::Error;
};

class NonAbelianUnsupported : public Error {
 public:
  NonAbelianUnsupported() : Error("operation requires an abelian group") {}
};

class DecompositionMismatch : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------- world / certifier

class ZeroScale : public Error {
 public:
  ZeroScale() : Error("embedding scales must be nonzero") {}
};

class IoFailure : public Error {
 public:
  using Error::Error;
};

class SizeMismatch : public Error {
 public:
  SizeMismatch(std::size_t expected, std::size_t actual)
      : Error("expected " + std::to_string(expected) + " entries, got " + std::to_string(actual)),
        expected(expected), actual(actual) {}
  std::size_t expected, actual;
};

class IllDefined : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  RankDeficient(std::size_t rank, std::size_t dim)
      : Error("latent data has rank " + std::to_string(rank) + " < dimension " +
              std::to_string(dim)),
        rank(rank), dim(dim) {}
  std::size_t rank, dim;
};

}  // namespace symcert
