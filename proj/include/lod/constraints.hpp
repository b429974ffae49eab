#pragma once

#include <string>
#include <vector>

#include "lod/fem.hpp"
#include "lod/grid.hpp"
#include "lod/linalg.hpp"
#include "lod/quadrature.hpp"

namespace lod {

enum class ConstraintMode { cg, dg };

std::string to_string(ConstraintMode mode);
ConstraintMode parse_mode(const std::string& s);

/// Piecewise polynomial constraint space M_H of degree p on the coarse mesh.
///
/// DG: tensor Legendre modes, L^2-orthonormal per element, j = T (p+1)^2 + b (p+1) + a.
/// CG: continuous Q^p on equispaced nodes, j = gy (p n + 1) + gx, with the
/// functions at mesh vertices replaced by the bilinear hats. No boundary
/// conditions are imposed.
///
/// Every element carries (p+1)^2 local functions in both modes; local index
/// b (p+1) + a.
class ConstraintSpace {
 public:
  ConstraintSpace(const CartesianMesh& mesh, int p, ConstraintMode mode);

  ConstraintMode mode() const { return mode_; }
  int degree() const { return p_; }
  const CartesianMesh& mesh() const { return mesh_; }
  int size() const { return size_; }
  int local_count() const { return (p_ + 1) * (p_ + 1); }

  /// Global index of local function `local` on element T.
  int element_function(int element, int local) const;
  std::vector<int> element_functions(int element) const;
  /// Elements in the support of Lambda_j, ascending.
  std::vector<int> support(int j) const;
  int support_size(int j) const;
  /// |T cap omega_j| / |omega_j| on the uniform mesh.
  double weight(int element, int j) const;

  /// DG only: the constant mode of element T.
  int constant_mode(int element) const;
  /// CG only: the hat function of a coarse mesh node.
  int vertex_function(int node) const;

  /// Value of local function `local` at reference point (s, t) of any element.
  double local_value(int local, double s, double t) const;
  /// Value of sum_j mu_j Lambda_j at a point of the domain.
  double evaluate(const Vector<double>& mu, double x, double y) const;

  /// int_T Lambda_local * Lambda_z^1 for the four vertex hats of T, ordered as
  /// CartesianMesh::element_nodes. Shape (p+1)^2 x 4.
  const DenseMatrix<double>& vertex_coupling() const { return vertex_coupling_; }

 private:
  CartesianMesh mesh_;
  int p_;
  ConstraintMode mode_;
  LagrangeBasis1D lagrange_;
  int size_;
  DenseMatrix<double> vertex_coupling_;
};

/// B(j, k) = (Lambda_j, phi_k) over all fine dofs.
SparseMatrix<double> assemble_b(const ConstraintSpace& space, const FeSpace& fe);

/// q(v) = B v.
Vector<double> qoi(const SparseMatrix<double>& b, const Vector<double>& v);

/// Constraint functions with support meeting the patch, ascending. Basis
/// functions are truncated to the patch.
std::vector<int> restrict_to_patch(const ConstraintSpace& space, const Patch& patch);

}  // namespace lod
