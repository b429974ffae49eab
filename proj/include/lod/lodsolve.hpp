#pragma once

#include "lod/constraints.hpp"
#include "lod/corrector.hpp"
#include "lod/fem.hpp"

namespace lod {

/// Coarse matrix, stored densely for J <= dense_limit and sparsely above.
template <class S>
struct CoarseMatrix {
  static constexpr int dense_limit = 5000;

  int size = 0;
  bool is_dense = true;
  DenseMatrix<S> dense;
  SparseMatrix<S> sparse;

  DenseMatrix<S> to_dense() const { return is_dense ? dense : DenseMatrix<S>(sparse); }
  Vector<S> apply(const Vector<S>& x) const { return is_dense ? Vector<S>(dense * x) : Vector<S>(sparse * x); }
};

/// left^T M right with M the matrix of `form`, assembled block by block over
/// coarse elements. `left` and `right` are (fine dofs) x J.
template <class S>
CoarseMatrix<S> galerkin_product(const FeSpace& fe, const BilinearForm<S>& form, const SparseMatrix<S>& left,
                                 const SparseMatrix<S>& right, int threads = 1);

/// Solves the coarse system: Cholesky for real input (the matrix must be SPD),
/// LU for complex input.
Vector<double> solve_coarse(const CoarseMatrix<double>& m, const Vector<double>& rhs);
Vector<Complex> solve_coarse(const CoarseMatrix<Complex>& m, const Vector<Complex>& rhs);

struct CoarseSystem {
  CoarseMatrix<double> stiffness;
  Vector<double> load;
};

struct LodSolution {
  Vector<double> coefficients;
  Vector<double> fine;
};

/// Stiffness a(phi_j, phi_i) and load (f, phi_i) for a given fine load vector
/// (mass matrix applied to the nodal interpolant of f).
CoarseSystem assemble_coarse(const FeSpace& fe, const BilinearForm<double>& form, const LodBasis<double>& basis,
                             const Vector<double>& fine_load, int threads = 1);

LodSolution solve(const CoarseSystem& system, const LodBasis<double>& basis);

/// Prototypical method without storing the basis. With (phi_j, lambda_j) the
/// global saddle solutions for data (0, e_j), a(phi_j, phi_i) = -lambda_j(i),
/// and sum_j c_j phi_j is the saddle solution for data (0, c).
class GlobalLodSolver {
 public:
  GlobalLodSolver(const FeSpace& fe, const SparseMatrix<double>& a, const SparseMatrix<double>& b);

  CoarseSystem coarse_system(const Vector<double>& fine_load, int threads = 1) const;
  Vector<double> reconstruct(const Vector<double>& coefficients) const;
  LodSolution solve(const Vector<double>& fine_load, int threads = 1) const;

 private:
  const FeSpace& fe_;
  int J_;
  std::unique_ptr<KktFactorization<double>> kkt_;
};

struct RelativeErrors {
  double energy = 0.0;
  double l2 = 0.0;
};

/// Relative energy and L^2 errors of `u` against the reference. Throws
/// std::invalid_argument for a zero reference.
RelativeErrors errors(const NormEvaluator& norms, const Vector<double>& u, const Vector<double>& reference);

}  // namespace lod
