#pragma once

#include <functional>
#include <vector>

#include "lod/grid.hpp"
#include "lod/linalg.hpp"
#include "lod/quadrature.hpp"

namespace lod {

/// Scalar field, piecewise constant on an m x m grid over a domain. Values
/// are stored row-major: values[j * m + i] for cell (i, j).
struct CoefficientField {
  Domain domain;
  int m = 1;
  std::vector<double> values{1.0};

  static CoefficientField constant(Domain domain, double value);
  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * m + i]; }
  double min() const;
  double max() const;

  friend bool operator==(const CoefficientField&, const CoefficientField&) = default;
};

enum class BoundaryCondition { dirichlet_zero, none, robin };

/// Continuous Q^q Lagrange space on the fine mesh of a refinement.
///
/// Dofs sit on the (q n_fine + 1)^2 lattice, numbered k = gy * side + gx. On a
/// fine element the local dof (a, b), 0 <= a, b <= q, has local index
/// b * (q + 1) + a.
class FeSpace {
 public:
  FeSpace(Refinement refinement, int q, BoundaryCondition bc = BoundaryCondition::dirichlet_zero);

  const Refinement& refinement() const { return refinement_; }
  const CartesianMesh& fine() const { return refinement_.fine; }
  const CartesianMesh& coarse() const { return refinement_.coarse; }
  int degree() const { return q_; }
  BoundaryCondition boundary_condition() const { return bc_; }

  int side() const { return side_; }
  int num_dofs() const { return side_ * side_; }
  int local_size() const { return (q_ + 1) * (q_ + 1); }
  int dof(int gx, int gy) const { return gy * side_ + gx; }
  std::pair<int, int> dof_xy(int k) const { return {k % side_, k / side_}; }
  std::array<double, 2> dof_coords(int k) const;
  bool on_boundary(int k) const;

  /// Interior dofs for dirichlet_zero, all dofs otherwise; ascending.
  const std::vector<int>& free_dofs() const { return free_; }
  void element_dofs(int fine_element, int* out) const;
  std::vector<int> element_dofs(int fine_element) const;

  const LagrangeBasis1D& basis() const { return basis_; }
  /// 1D stiffness and mass on [0, 1].
  const DenseMatrix<double>& stiffness_1d() const { return k1_; }
  const DenseMatrix<double>& mass_1d() const { return m1_; }
  /// Unit-square element matrices: int grad.grad (h-independent in 2D) and
  /// int uv on [0,1]^2 (scale by h^2).
  const DenseMatrix<double>& reference_stiffness() const { return kref_; }
  const DenseMatrix<double>& reference_mass() const { return mref_; }

 private:
  Refinement refinement_;
  int q_;
  BoundaryCondition bc_;
  int side_;
  std::vector<int> free_;
  LagrangeBasis1D basis_;
  DenseMatrix<double> k1_, m1_, kref_, mref_;
};

/// Value of the field on each fine element. Throws AlignmentError unless every
/// fine element lies in exactly one field cell.
std::vector<double> coefficient_per_element(const FeSpace& space, const CoefficientField& field);

/// Element-local form  w_K (grad u, grad v)_K + w_M (u, v)_K + w_B (u, v)_{dK cap dOmega}
/// with piecewise constant weights per fine element.
template <class S>
struct BilinearForm {
  const FeSpace* space = nullptr;
  std::vector<S> stiffness_weight;
  std::vector<S> mass_weight;
  S boundary_weight = S(0);

  DenseMatrix<S> element_matrix(int fine_element) const;
  /// Matrix over all dofs.
  SparseMatrix<S> assemble() const;
};

BilinearForm<double> diffusion_form(const FeSpace& space, const CoefficientField& a);
/// (grad u, grad v) + (V u, v)
BilinearForm<double> diffusion_reaction_form(const FeSpace& space, const CoefficientField& v);

SparseMatrix<double> assemble_stiffness(const FeSpace& space, const CoefficientField& a);
SparseMatrix<double> assemble_mass(const FeSpace& space, const CoefficientField& weight);
SparseMatrix<double> assemble_mass(const FeSpace& space, double weight = 1.0);
/// Mass on fine edges along the domain boundary.
SparseMatrix<double> assemble_boundary_mass(const FeSpace& space, double weight = 1.0);

using ScalarFunction = std::function<double(double, double)>;

/// Nodal interpolant over all dofs.
Vector<double> interpolate(const FeSpace& space, const ScalarFunction& f);

/// Galerkin solution of -div(A grad u) = f with u = 0 on the boundary. The
/// load is the mass matrix applied to the nodal interpolant of f.
Vector<double> solve_reference(const FeSpace& space, const CoefficientField& a, const ScalarFunction& f);

template <class S>
Vector<S> gather(const Vector<S>& v, const std::vector<int>& idx);
template <class S>
Vector<S> scatter(const Vector<S>& local, const std::vector<int>& idx, int n);
/// Rows and columns `idx` of m.
template <class S>
SparseMatrix<S> submatrix(const SparseMatrix<S>& m, const std::vector<int>& rows, const std::vector<int>& cols);

struct Norms {
  double l2 = 0.0;
  double energy = 0.0;
  double h1 = 0.0;  // |grad u|
};

Norms norms(const FeSpace& space, const Vector<double>& u, const CoefficientField& a);

/// Norms from preassembled matrices (energy, mass, unit-coefficient stiffness).
class NormEvaluator {
 public:
  NormEvaluator(const FeSpace& space, const CoefficientField& a);
  Norms operator()(const Vector<double>& u) const;
  const SparseMatrix<double>& stiffness() const { return k_; }
  const SparseMatrix<double>& mass() const { return m_; }
  const SparseMatrix<double>& laplace() const { return k1_; }

 private:
  SparseMatrix<double> k_, m_, k1_;
};

}  // namespace lod
