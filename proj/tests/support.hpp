#pragma once

#include <random>

#include "lod/constraints.hpp"
#include "lod/fem.hpp"
#include "lod/linalg.hpp"

namespace lod::test {

inline Vector<double> random_vector(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector<double> v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

/// Random fine function vanishing on the boundary when the space is H^1_0.
inline Vector<double> random_fine(const FeSpace& fe, std::mt19937_64& rng) {
  Vector<double> v = random_vector(fe.num_dofs(), rng);
  if (fe.boundary_condition() == BoundaryCondition::dirichlet_zero)
    for (int k = 0; k < fe.num_dofs(); ++k)
      if (fe.on_boundary(k)) v(k) = 0.0;
  return v;
}

/// Euclidean projection of v onto {w : B w = 0} over the free dofs.
class KernelProjector {
 public:
  KernelProjector(const FeSpace& fe, const SparseMatrix<double>& b) : fe_(fe) {
    std::vector<int> rows(b.rows());
    for (int j = 0; j < b.rows(); ++j) rows[j] = j;
    bf_ = submatrix(b, rows, fe.free_dofs());
    SparseMatrix<double> gram = bf_ * SparseMatrix<double>(bf_.transpose());
    gram_ = std::make_unique<SpdFactorization>(gram);
  }

  Vector<double> operator()(const Vector<double>& v) const {
    const auto& free = fe_.free_dofs();
    Vector<double> vf = gather(v, free);
    vf -= bf_.transpose() * gram_->solve(bf_ * vf);
    return scatter(vf, free, fe_.num_dofs());
  }

 private:
  const FeSpace& fe_;
  SparseMatrix<double> bf_;
  std::unique_ptr<SpdFactorization> gram_;
};

inline FeSpace make_space(int coarse_n, int ratio, int q = 1, BoundaryCondition bc = BoundaryCondition::dirichlet_zero,
                          Domain d = Domain::unit_square()) {
  return FeSpace(refine(build_mesh(d, coarse_n), ratio), q, bc);
}

inline double max_abs(const Vector<double>& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace lod::test
