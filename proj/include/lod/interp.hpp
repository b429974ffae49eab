#pragma once

#include "lod/constraints.hpp"
#include "lod/fem.hpp"

namespace lod {

/// Quasi-interpolation onto continuous bilinears on the coarse mesh, vanishing
/// on the boundary. Nodal values are linear in the QOI vector:
///   (I_H v)(z) = sum_j kappa(z, j) q_j(v)  for interior nodes z.
///
/// CG: (I_H v)(z) = (int Lambda_z^1)^{-1} int v Lambda_z^1.
/// DG: (I_H v)(z) = sum_{T in omega_z} |T|/|omega_z| * (mean of v on T).
class QuasiInterpolator {
 public:
  QuasiInterpolator(const ConstraintSpace& space, const FeSpace& fe);

  const ConstraintSpace& space() const { return *space_; }
  /// Sparse (coarse nodes) x J, rows of boundary nodes empty.
  const SparseMatrix<double>& kappa() const { return kappa_; }
  /// Bilinear coarse nodal values -> fine dofs (exact embedding).
  const SparseMatrix<double>& prolongation() const { return prolongation_; }
  const std::vector<int>& interior_nodes() const { return interior_; }

  /// Coarse nodal values of I_H v from the QOI vector.
  Vector<double> nodal_values(const Vector<double>& qoi) const { return kappa_ * qoi; }
  /// I_H v as a fine function, from the QOI vector q = B v.
  Vector<double> apply_qoi(const Vector<double>& qoi) const { return prolongation_ * nodal_values(qoi); }
  /// I_H v as a fine function.
  Vector<double> apply(const SparseMatrix<double>& b, const Vector<double>& v) const { return apply_qoi(b * v); }

 private:
  const ConstraintSpace* space_;
  SparseMatrix<double> kappa_;
  SparseMatrix<double> prolongation_;
  std::vector<int> interior_;
};

/// Coarse Q1 nodal values -> fine Q^q dofs.
SparseMatrix<double> coarse_prolongation(const FeSpace& fe);

}  // namespace lod
