#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace lod {

using Complex = std::complex<double>;

template <class S>
using SparseMatrix = Eigen::SparseMatrix<S, Eigen::ColMajor, int>;
template <class S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <class S>
using DenseMatrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Triplet = Eigen::Triplet<S, int>;

/// Builds a compressed matrix, summing duplicates. The summation order is
/// fixed by sorting, so the result does not depend on the triplet order.
template <class S>
SparseMatrix<S> assemble(int rows, int cols, std::vector<Triplet<S>> triplets);

/// Max-norm of M - M^T relative to the max-norm of M (0 for M = 0).
template <class S>
double symmetry_defect(const SparseMatrix<S>& m);

/// Reusable sparse LDL^T factorization of a symmetric positive definite matrix.
class SpdFactorization {
 public:
  explicit SpdFactorization(const SparseMatrix<double>& m);
  Vector<double> solve(const Vector<double>& rhs) const;
  int size() const { return n_; }

 private:
  Eigen::SimplicialLDLT<SparseMatrix<double>> ldlt_;
  int n_;
};

/// Throws NumericalBreakdown on a non-positive pivot.
Vector<double> solve_spd(const SparseMatrix<double>& m, const Vector<double>& rhs);

/// Sparse LU (UMFPACK) of a square matrix, real or complex. Solves against one
/// factorization may run concurrently.
template <class S>
class SparseLu {
 public:
  explicit SparseLu(SparseMatrix<S> m);
  ~SparseLu();
  SparseLu(const SparseLu&) = delete;
  SparseLu& operator=(const SparseLu&) = delete;

  Vector<S> solve(const Vector<S>& rhs) const;
  int size() const { return static_cast<int>(m_.rows()); }
  /// Reciprocal condition estimate reported by the factorization.
  double rcond() const { return rcond_; }
  bool singular() const { return singular_; }

 private:
  SparseMatrix<S> m_;
  void* numeric_ = nullptr;
  double rcond_ = 0.0;
  bool singular_ = false;
};

/// Number of rows of B that are linearly dependent on the others, decided by a
/// pivoted LDL^T of the row-normalized Gram matrix B B^T with pivot threshold
/// `tol` relative to the largest pivot.
template <class S>
int constraint_rank_deficiency(const SparseMatrix<S>& b, double tol = 1e-10);

/// Throws ConstraintRankError if B loses row rank.
template <class S>
void check_constraint_rank(const SparseMatrix<S>& b, double tol = 1e-10);

/// Direct factorization of the bordered matrix [[A, B^T], [B, 0]].
template <class S>
class KktFactorization {
 public:
  /// B must have full row rank; call check_constraint_rank first when unsure.
  /// A singular bordered matrix is diagnosed and reported as ConstraintRankError
  /// or NumericalBreakdown.
  KktFactorization(const SparseMatrix<S>& a, const SparseMatrix<S>& b);

  /// Returns (x, lambda) with A x + B^T lambda = f and B x = g.
  std::pair<Vector<S>, Vector<S>> solve(const Vector<S>& f, const Vector<S>& g) const;

  int primal_size() const { return n_; }
  int constraint_size() const { return m_; }

 private:
  int n_, m_;
  std::unique_ptr<SparseLu<S>> lu_;
  std::unique_ptr<SpdFactorization> spd_;  // used when m = 0 and S is real
};

struct KktSystem {
  SparseMatrix<double> a;
  SparseMatrix<double> b;
  Vector<double> f;
  Vector<double> g;
};

std::pair<Vector<double>, Vector<double>> solve_kkt(const KktSystem& sys);

/// Relative residuals (primal block, constraint block) of a KKT solution.
template <class S>
std::pair<double, double> kkt_residual(const SparseMatrix<S>& a, const SparseMatrix<S>& b, const Vector<S>& f,
                                       const Vector<S>& g, const Vector<S>& x, const Vector<S>& lambda);

/// Dense solve for small coarse systems: Cholesky for real symmetric positive
/// definite input (NumericalBreakdown otherwise), LU for complex input
/// (SingularSystemError below rcond 1e-14).
Vector<double> solve_dense_spd(const DenseMatrix<double>& m, const Vector<double>& rhs);
Vector<Complex> solve_dense_general(const DenseMatrix<Complex>& m, const Vector<Complex>& rhs);

}  // namespace lod
