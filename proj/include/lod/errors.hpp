#pragma once

#include <stdexcept>
#include <string>

namespace lod {

/// Coefficient grid does not align with the fine mesh.
class AlignmentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A factorization met a pivot it could not use.
class NumericalBreakdown : public std::runtime_error {
 public:
  NumericalBreakdown(const std::string& what, long pivot)
      : std::runtime_error(what), pivot_(pivot) {}
  long pivot() const { return pivot_; }

 private:
  long pivot_;
};

/// The constraint block of a saddle point system lost row rank. Usually the
/// fine mesh is too coarse relative to the coarse mesh and the degree.
class ConstraintRankError : public std::runtime_error {
 public:
  ConstraintRankError(const std::string& what, int deficient_rows)
      : std::runtime_error(what), deficient_rows_(deficient_rows) {}
  int deficient_rows() const { return deficient_rows_; }

 private:
  int deficient_rows_;
};

/// Problem too large for a dense diagnostic.
class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coarse Petrov-Galerkin matrix is numerically singular.
class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& what, double rcond)
      : std::runtime_error(what), rcond_(rcond) {}
  double rcond() const { return rcond_; }

 private:
  double rcond_;
};

}  // namespace lod
