#include "lod/grid.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace lod {

CartesianMesh::CartesianMesh(Domain domain, int n) : domain_(domain), n_(n) {
  if (n < 1) throw std::invalid_argument("mesh needs at least one cell per side, got " + std::to_string(n));
  if (!(domain.side > 0.0)) throw std::invalid_argument("domain side length must be positive");
  h_ = domain.side / n;
}

bool CartesianMesh::is_boundary_node(int k) const {
  auto [i, j] = node_ij(k);
  return i == 0 || j == 0 || i == n_ || j == n_;
}

std::array<int, 4> CartesianMesh::element_nodes(int e) const {
  auto [i, j] = element_ij(e);
  return {node_id(i, j), node_id(i + 1, j), node_id(i, j + 1), node_id(i + 1, j + 1)};
}

std::vector<int> CartesianMesh::elements_around_node(int k) const {
  auto [i, j] = node_ij(k);
  std::vector<int> out;
  for (int ej = j - 1; ej <= j; ++ej)
    for (int ei = i - 1; ei <= i; ++ei)
      if (ei >= 0 && ej >= 0 && ei < n_ && ej < n_) out.push_back(element_id(ei, ej));
  return out;
}

std::array<double, 2> CartesianMesh::node_coords(int k) const {
  auto [i, j] = node_ij(k);
  return {domain_.x0 + i * h_, domain_.y0 + j * h_};
}

std::array<double, 2> CartesianMesh::element_origin(int e) const {
  auto [i, j] = element_ij(e);
  return {domain_.x0 + i * h_, domain_.y0 + j * h_};
}

CartesianMesh build_mesh(Domain domain, int n) { return CartesianMesh(domain, n); }

int Refinement::parent(int fine_element) const {
  auto [i, j] = fine.element_ij(fine_element);
  return coarse.element_id(i / ratio, j / ratio);
}

std::vector<int> Refinement::children(int coarse_element) const {
  auto [ci, cj] = coarse.element_ij(coarse_element);
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(ratio) * ratio);
  for (int j = cj * ratio; j < (cj + 1) * ratio; ++j)
    for (int i = ci * ratio; i < (ci + 1) * ratio; ++i) out.push_back(fine.element_id(i, j));
  return out;
}

Refinement refine(const CartesianMesh& coarse, int ratio) {
  if (ratio < 1) throw std::invalid_argument("refinement ratio must be positive");
  // Q^q node ids for q <= 4 must stay within int.
  constexpr long long max_cells = 8000;
  if (static_cast<long long>(coarse.n()) * ratio > max_cells)
    throw std::invalid_argument("refined mesh exceeds index space (" + std::to_string(coarse.n()) + " x " +
                                std::to_string(ratio) + " cells per side)");
  return Refinement{coarse, CartesianMesh(coarse.domain(), coarse.n() * ratio), ratio};
}

Patch patch(const CartesianMesh& mesh, std::span<const int> centers, int order) {
  if (centers.empty()) throw std::invalid_argument("patch needs a non-empty center set");
  if (order < 0) throw std::invalid_argument("patch order must be non-negative");
  const int n = mesh.n();
  Patch out;
  out.centers.assign(centers.begin(), centers.end());
  out.order = order;
  out.mask.assign(static_cast<std::size_t>(mesh.num_elements()), 0);
  for (int e : centers) {
    if (e < 0 || e >= mesh.num_elements()) throw std::invalid_argument("patch center outside the mesh");
    out.mask[e] = 1;
  }
  std::vector<char> next;
  for (int step = 0; step < order; ++step) {
    next = out.mask;
    for (int e = 0; e < mesh.num_elements(); ++e) {
      if (!out.mask[e]) continue;
      auto [i, j] = mesh.element_ij(e);
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          int ii = i + di, jj = j + dj;
          if (ii >= 0 && jj >= 0 && ii < n && jj < n) next[mesh.element_id(ii, jj)] = 1;
        }
    }
    out.mask.swap(next);
  }
  for (int e = 0; e < mesh.num_elements(); ++e)
    if (out.mask[e]) out.elements.push_back(e);
  return out;
}

Patch patch(const CartesianMesh& mesh, int center, int order) {
  return patch(mesh, std::span<const int>(&center, 1), order);
}

namespace {

// Coarse cells (along one axis) touched by fine node coordinate g, where
// `stride` fine nodes span one coarse cell.
inline std::pair<int, int> touched_cells(int g, int stride, int n) {
  int c = g / stride;
  if (g % stride == 0) return {std::max(c - 1, 0), std::min(c, n - 1)};
  return {c, c};
}

}  // namespace

std::vector<int> fine_dofs_in_patch(const Refinement& refinement, const Patch& patch, int q,
                                    bool zero_on_domain_boundary) {
  const CartesianMesh& coarse = refinement.coarse;
  const int n = coarse.n();
  const int stride = refinement.ratio * q;
  const int side = n * stride + 1;

  // Bounding box in coarse cells keeps the scan local.
  int imin = n, imax = -1, jmin = n, jmax = -1;
  for (int e : patch.elements) {
    auto [i, j] = coarse.element_ij(e);
    imin = std::min(imin, i);
    imax = std::max(imax, i);
    jmin = std::min(jmin, j);
    jmax = std::max(jmax, j);
  }
  std::vector<int> out;
  if (imax < 0) return out;

  for (int gy = jmin * stride; gy <= (jmax + 1) * stride; ++gy) {
    for (int gx = imin * stride; gx <= (imax + 1) * stride; ++gx) {
      bool on_boundary = gx == 0 || gy == 0 || gx == side - 1 || gy == side - 1;
      if (zero_on_domain_boundary && on_boundary) continue;
      auto [i0, i1] = touched_cells(gx, stride, n);
      auto [j0, j1] = touched_cells(gy, stride, n);
      bool inside = true;
      for (int j = j0; j <= j1 && inside; ++j)
        for (int i = i0; i <= i1 && inside; ++i) inside = patch.contains(coarse.element_id(i, j));
      if (inside) out.push_back(gy * side + gx);
    }
  }
  return out;
}

}  // namespace lod
