#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

namespace lod {

/// Axis-aligned square [x0, x0 + side] x [y0, y0 + side].
struct Domain {
  double x0 = 0.0;
  double y0 = 0.0;
  double side = 1.0;

  static Domain unit_square() { return {}; }
  /// (-half, half)^2
  static Domain centered(double half) { return {-half, -half, 2.0 * half}; }

  friend bool operator==(const Domain&, const Domain&) = default;
};

/// Uniform Cartesian mesh with n x n square cells.
///
/// Elements are numbered e = j * n + i and nodes k = j * (n + 1) + i, with i
/// running along x.
class CartesianMesh {
 public:
  CartesianMesh() = default;
  CartesianMesh(Domain domain, int n);

  const Domain& domain() const { return domain_; }
  int n() const { return n_; }
  double h() const { return h_; }

  int num_elements() const { return n_ * n_; }
  int num_nodes() const { return (n_ + 1) * (n_ + 1); }

  int element_id(int i, int j) const { return j * n_ + i; }
  std::pair<int, int> element_ij(int e) const { return {e % n_, e / n_}; }
  int node_id(int i, int j) const { return j * (n_ + 1) + i; }
  std::pair<int, int> node_ij(int k) const { return {k % (n_ + 1), k / (n_ + 1)}; }

  bool is_boundary_node(int k) const;
  /// Nodes of element e ordered (ll, lr, ul, ur).
  std::array<int, 4> element_nodes(int e) const;
  /// Elements sharing node k, ascending.
  std::vector<int> elements_around_node(int k) const;
  std::array<double, 2> node_coords(int k) const;
  /// Lower-left corner of element e.
  std::array<double, 2> element_origin(int e) const;

  friend bool operator==(const CartesianMesh& a, const CartesianMesh& b) {
    return a.domain_ == b.domain_ && a.n_ == b.n_;
  }

 private:
  Domain domain_;
  int n_ = 0;
  double h_ = 0.0;
};

CartesianMesh build_mesh(Domain domain, int n);

/// Nested pair of meshes with n_fine = ratio * n_coarse.
struct Refinement {
  CartesianMesh coarse;
  CartesianMesh fine;
  int ratio = 1;

  int parent(int fine_element) const;
  /// Fine elements inside a coarse element, ascending.
  std::vector<int> children(int coarse_element) const;
};

Refinement refine(const CartesianMesh& coarse, int ratio);

/// Element patch N^order(centers) on a Cartesian mesh.
struct Patch {
  std::vector<int> centers;
  int order = 0;
  std::vector<int> elements;  // ascending
  std::vector<char> mask;     // indexed by element id

  bool contains(int e) const { return mask[e] != 0; }
  std::size_t size() const { return elements.size(); }
};

/// One-ring expansion applied `order` times, clipped to the mesh.
Patch patch(const CartesianMesh& mesh, std::span<const int> centers, int order);
Patch patch(const CartesianMesh& mesh, int center, int order);

/// Fine Q^q nodes with a zero trace on the patch boundary, ascending.
///
/// With `zero_on_domain_boundary` the part of the patch boundary lying on the
/// domain boundary is constrained as well (H^1_0); otherwise nodes there stay
/// free (H^1, used for Robin problems).
std::vector<int> fine_dofs_in_patch(const Refinement& refinement, const Patch& patch, int q,
                                    bool zero_on_domain_boundary = true);

}  // namespace lod
