#include "lod/constraints.hpp"

#include <algorithm>
#include <stdexcept>

#include "lod/quadrature.hpp"

namespace lod {

std::string to_string(ConstraintMode mode) { return mode == ConstraintMode::cg ? "cg" : "dg"; }

ConstraintMode parse_mode(const std::string& s) {
  if (s == "cg" || s == "CG") return ConstraintMode::cg;
  if (s == "dg" || s == "DG") return ConstraintMode::dg;
  throw std::invalid_argument("unknown constraint mode '" + s + "' (expected cg or dg)");
}

ConstraintSpace::ConstraintSpace(const CartesianMesh& mesh, int p, ConstraintMode mode)
    : mesh_(mesh), p_(p), mode_(mode), lagrange_(std::max(p, 1)) {
  if (p < 1) throw std::invalid_argument("constraint degree must be at least 1");
  const int n = mesh.n();
  size_ = mode == ConstraintMode::dg ? n * n * local_count() : (p * n + 1) * (p * n + 1);

  GaussRule g = gauss_legendre(p + 2);
  const double area = mesh.h() * mesh.h();
  vertex_coupling_ = DenseMatrix<double>::Zero(local_count(), 4);
  for (int iy = 0; iy < g.size(); ++iy)
    for (int ix = 0; ix < g.size(); ++ix) {
      double s = g.x[ix], t = g.x[iy], w = g.w[ix] * g.w[iy] * area;
      const double hats[4] = {(1 - s) * (1 - t), s * (1 - t), (1 - s) * t, s * t};
      for (int l = 0; l < local_count(); ++l) {
        double v = local_value(l, s, t);
        for (int c = 0; c < 4; ++c) vertex_coupling_(l, c) += w * v * hats[c];
      }
    }
}

int ConstraintSpace::element_function(int element, int local) const {
  if (mode_ == ConstraintMode::dg) return element * local_count() + local;
  auto [ci, cj] = mesh_.element_ij(element);
  int a = local % (p_ + 1), b = local / (p_ + 1);
  return (p_ * cj + b) * (p_ * mesh_.n() + 1) + p_ * ci + a;
}

std::vector<int> ConstraintSpace::element_functions(int element) const {
  std::vector<int> out(local_count());
  for (int l = 0; l < local_count(); ++l) out[l] = element_function(element, l);
  return out;
}

namespace {

// Cells along one axis containing lattice coordinate g of a degree-p node lattice.
std::pair<int, int> cell_range(int g, int p, int n) {
  int c = g / p;
  if (g % p == 0) return {std::max(c - 1, 0), std::min(c, n - 1)};
  return {c, c};
}

}  // namespace

std::vector<int> ConstraintSpace::support(int j) const {
  if (j < 0 || j >= size_) throw std::out_of_range("constraint index out of range");
  if (mode_ == ConstraintMode::dg) return {j / local_count()};
  const int side = p_ * mesh_.n() + 1;
  auto [i0, i1] = cell_range(j % side, p_, mesh_.n());
  auto [j0, j1] = cell_range(j / side, p_, mesh_.n());
  std::vector<int> out;
  for (int cj = j0; cj <= j1; ++cj)
    for (int ci = i0; ci <= i1; ++ci) out.push_back(mesh_.element_id(ci, cj));
  return out;
}

int ConstraintSpace::support_size(int j) const {
  if (mode_ == ConstraintMode::dg) return 1;
  const int side = p_ * mesh_.n() + 1;
  auto [i0, i1] = cell_range(j % side, p_, mesh_.n());
  auto [j0, j1] = cell_range(j / side, p_, mesh_.n());
  return (i1 - i0 + 1) * (j1 - j0 + 1);
}

double ConstraintSpace::weight(int element, int j) const {
  auto s = support(j);
  return std::binary_search(s.begin(), s.end(), element) ? 1.0 / static_cast<double>(s.size()) : 0.0;
}

int ConstraintSpace::constant_mode(int element) const {
  if (mode_ != ConstraintMode::dg) throw std::logic_error("constant modes exist only in DG mode");
  return element * local_count();
}

int ConstraintSpace::vertex_function(int node) const {
  if (mode_ != ConstraintMode::cg) throw std::logic_error("vertex functions exist only in CG mode");
  auto [i, j] = mesh_.node_ij(node);
  return p_ * j * (p_ * mesh_.n() + 1) + p_ * i;
}

double ConstraintSpace::local_value(int local, double s, double t) const {
  const int a = local % (p_ + 1), b = local / (p_ + 1);
  if (mode_ == ConstraintMode::dg) return scaled_legendre(a, s) * scaled_legendre(b, t) / mesh_.h();
  const bool corner = (a == 0 || a == p_) && (b == 0 || b == p_);
  if (corner) return (a == 0 ? 1 - s : s) * (b == 0 ? 1 - t : t);
  return lagrange_.value(a, s) * lagrange_.value(b, t);
}

double ConstraintSpace::evaluate(const Vector<double>& mu, double x, double y) const {
  const Domain& d = mesh_.domain();
  const int n = mesh_.n();
  double fx = (x - d.x0) / mesh_.h(), fy = (y - d.y0) / mesh_.h();
  int ci = std::clamp(static_cast<int>(fx), 0, n - 1);
  int cj = std::clamp(static_cast<int>(fy), 0, n - 1);
  int e = mesh_.element_id(ci, cj);
  double out = 0.0;
  for (int l = 0; l < local_count(); ++l) out += mu(element_function(e, l)) * local_value(l, fx - ci, fy - cj);
  return out;
}

SparseMatrix<double> assemble_b(const ConstraintSpace& space, const FeSpace& fe) {
  if (!(space.mesh() == fe.coarse()))
    throw std::invalid_argument("constraint space and finite element space use different coarse meshes");
  const int p = space.degree(), q = fe.degree();
  const int r = fe.refinement().ratio;
  const int nl = space.local_count(), nf = fe.local_size();
  const double h = fe.fine().h();
  const LagrangeBasis1D& basis = fe.basis();
  GaussRule g = gauss_legendre(p + q + 1);
  const int ng = g.size();

  // Fine shape functions at the quadrature points.
  DenseMatrix<double> phi(nf, ng * ng);
  for (int iy = 0; iy < ng; ++iy)
    for (int ix = 0; ix < ng; ++ix)
      for (int b = 0; b <= q; ++b)
        for (int a = 0; a <= q; ++a)
          phi(b * (q + 1) + a, iy * ng + ix) = basis.value(a, g.x[ix]) * basis.value(b, g.x[iy]);

  // One block per sub-position of a fine element inside its coarse element.
  std::vector<DenseMatrix<double>> blocks(static_cast<std::size_t>(r) * r);
  DenseMatrix<double> lam(nl, ng * ng);
  for (int sy = 0; sy < r; ++sy)
    for (int sx = 0; sx < r; ++sx) {
      for (int iy = 0; iy < ng; ++iy)
        for (int ix = 0; ix < ng; ++ix) {
          double s = (sx + g.x[ix]) / r, t = (sy + g.x[iy]) / r;
          double w = g.w[ix] * g.w[iy] * h * h;
          for (int l = 0; l < nl; ++l) lam(l, iy * ng + ix) = w * space.local_value(l, s, t);
        }
      blocks[static_cast<std::size_t>(sy) * r + sx] = lam * phi.transpose();
    }

  std::vector<Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(fe.fine().num_elements()) * nl * nf);
  std::vector<int> dofs(nf);
  for (int e = 0; e < fe.fine().num_elements(); ++e) {
    auto [i, j] = fe.fine().element_ij(e);
    int parent = fe.refinement().parent(e);
    const auto& blk = blocks[static_cast<std::size_t>(j % r) * r + i % r];
    fe.element_dofs(e, dofs.data());
    for (int l = 0; l < nl; ++l) {
      int row = space.element_function(parent, l);
      for (int k = 0; k < nf; ++k) t.emplace_back(row, dofs[k], blk(l, k));
    }
  }
  return assemble<double>(space.size(), fe.num_dofs(), std::move(t));
}

Vector<double> qoi(const SparseMatrix<double>& b, const Vector<double>& v) { return b * v; }

std::vector<int> restrict_to_patch(const ConstraintSpace& space, const Patch& patch) {
  std::vector<int> out;
  out.reserve(patch.size() * space.local_count());
  for (int e : patch.elements)
    for (int l = 0; l < space.local_count(); ++l) out.push_back(space.element_function(e, l));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace lod
