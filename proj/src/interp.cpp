#include "lod/interp.hpp"

#include <cmath>

namespace lod {

SparseMatrix<double> coarse_prolongation(const FeSpace& fe) {
  const CartesianMesh& coarse = fe.coarse();
  const int n = coarse.n();
  const int stride = fe.refinement().ratio * fe.degree();
  std::vector<Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(fe.num_dofs()) * 4);
  for (int k = 0; k < fe.num_dofs(); ++k) {
    auto [gx, gy] = fe.dof_xy(k);
    int ci = std::min(gx / stride, n - 1), cj = std::min(gy / stride, n - 1);
    double s = static_cast<double>(gx - ci * stride) / stride;
    double u = static_cast<double>(gy - cj * stride) / stride;
    const double w[4] = {(1 - s) * (1 - u), s * (1 - u), (1 - s) * u, s * u};
    auto nodes = coarse.element_nodes(coarse.element_id(ci, cj));
    for (int c = 0; c < 4; ++c)
      if (w[c] != 0.0) t.emplace_back(k, nodes[c], w[c]);
  }
  return assemble<double>(fe.num_dofs(), coarse.num_nodes(), std::move(t));
}

QuasiInterpolator::QuasiInterpolator(const ConstraintSpace& space, const FeSpace& fe)
    : space_(&space), prolongation_(coarse_prolongation(fe)) {
  const CartesianMesh& mesh = space.mesh();
  const double area = mesh.h() * mesh.h();
  std::vector<Triplet<double>> t;
  for (int z = 0; z < mesh.num_nodes(); ++z) {
    if (mesh.is_boundary_node(z)) continue;
    interior_.push_back(z);
    if (space.mode() == ConstraintMode::cg) {
      // int of the hat over its four elements is |T|.
      t.emplace_back(z, space.vertex_function(z), 1.0 / area);
    } else {
      auto elems = mesh.elements_around_node(z);
      double patch_area = area * static_cast<double>(elems.size());
      // mean of v on T = |T|^{-1/2} q_{(T,0)}(v)
      for (int e : elems) t.emplace_back(z, space.constant_mode(e), area / patch_area / std::sqrt(area));
    }
  }
  kappa_ = assemble<double>(mesh.num_nodes(), space.size(), std::move(t));
}

}  // namespace lod
