#include "lod/fem.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "lod/errors.hpp"

namespace lod {

CoefficientField CoefficientField::constant(Domain domain, double value) { return {domain, 1, {value}}; }

double CoefficientField::min() const { return *std::min_element(values.begin(), values.end()); }
double CoefficientField::max() const { return *std::max_element(values.begin(), values.end()); }

FeSpace::FeSpace(Refinement refinement, int q, BoundaryCondition bc)
    : refinement_(std::move(refinement)), q_(q), bc_(bc), side_(q * refinement_.fine.n() + 1), basis_(q) {
  if (q < 1) throw std::invalid_argument("finite element degree must be positive");
  for (int k = 0; k < num_dofs(); ++k)
    if (bc_ != BoundaryCondition::dirichlet_zero || !on_boundary(k)) free_.push_back(k);

  GaussRule g = gauss_legendre(q + 1);
  k1_ = DenseMatrix<double>::Zero(q + 1, q + 1);
  m1_ = DenseMatrix<double>::Zero(q + 1, q + 1);
  for (int p = 0; p < g.size(); ++p)
    for (int a = 0; a <= q; ++a)
      for (int b = 0; b <= q; ++b) {
        k1_(a, b) += g.w[p] * basis_.derivative(a, g.x[p]) * basis_.derivative(b, g.x[p]);
        m1_(a, b) += g.w[p] * basis_.value(a, g.x[p]) * basis_.value(b, g.x[p]);
      }
  const int n = local_size();
  kref_.resize(n, n);
  mref_.resize(n, n);
  for (int b = 0; b <= q; ++b)
    for (int a = 0; a <= q; ++a)
      for (int bb = 0; bb <= q; ++bb)
        for (int aa = 0; aa <= q; ++aa) {
          int r = b * (q + 1) + a, c = bb * (q + 1) + aa;
          kref_(r, c) = k1_(a, aa) * m1_(b, bb) + m1_(a, aa) * k1_(b, bb);
          mref_(r, c) = m1_(a, aa) * m1_(b, bb);
        }
}

std::array<double, 2> FeSpace::dof_coords(int k) const {
  auto [gx, gy] = dof_xy(k);
  const Domain& d = fine().domain();
  double step = d.side / (side_ - 1);
  return {d.x0 + gx * step, d.y0 + gy * step};
}

bool FeSpace::on_boundary(int k) const {
  auto [gx, gy] = dof_xy(k);
  return gx == 0 || gy == 0 || gx == side_ - 1 || gy == side_ - 1;
}

void FeSpace::element_dofs(int fine_element, int* out) const {
  auto [ex, ey] = fine().element_ij(fine_element);
  for (int b = 0; b <= q_; ++b)
    for (int a = 0; a <= q_; ++a) out[b * (q_ + 1) + a] = dof(q_ * ex + a, q_ * ey + b);
}

std::vector<int> FeSpace::element_dofs(int fine_element) const {
  std::vector<int> out(local_size());
  element_dofs(fine_element, out.data());
  return out;
}

std::vector<double> coefficient_per_element(const FeSpace& space, const CoefficientField& field) {
  const CartesianMesh& fine = space.fine();
  const int nf = fine.n();
  if (field.m < 1 || field.values.size() != static_cast<std::size_t>(field.m) * field.m)
    throw std::invalid_argument("coefficient field has " + std::to_string(field.values.size()) +
                                " values for an m = " + std::to_string(field.m) + " grid");
  if (!(field.domain == fine.domain()))
    throw AlignmentError("coefficient field domain differs from the mesh domain");
  if (nf % field.m != 0)
    throw AlignmentError("coefficient grid (m = " + std::to_string(field.m) + ") does not align with the fine mesh (n_fine = " +
                         std::to_string(nf) + ")");
  const int r = nf / field.m;
  std::vector<double> out(static_cast<std::size_t>(nf) * nf);
  for (int j = 0; j < nf; ++j)
    for (int i = 0; i < nf; ++i) out[fine.element_id(i, j)] = field.at(i / r, j / r);
  return out;
}

template <class S>
DenseMatrix<S> BilinearForm<S>::element_matrix(int fine_element) const {
  const FeSpace& sp = *space;
  const double h = sp.fine().h();
  DenseMatrix<S> out = stiffness_weight[fine_element] * sp.reference_stiffness().template cast<S>();
  if (!mass_weight.empty() && mass_weight[fine_element] != S(0))
    out += (mass_weight[fine_element] * (h * h)) * sp.reference_mass().template cast<S>();
  if (boundary_weight != S(0)) {
    const int q = sp.degree(), n = sp.fine().n();
    auto [ex, ey] = sp.fine().element_ij(fine_element);
    const auto& m1 = sp.mass_1d();
    auto add_edge = [&](auto local) {
      for (int a = 0; a <= q; ++a)
        for (int b = 0; b <= q; ++b) out(local(a), local(b)) += boundary_weight * (h * m1(a, b));
    };
    if (ey == 0) add_edge([&](int a) { return a; });
    if (ey == n - 1) add_edge([&](int a) { return q * (q + 1) + a; });
    if (ex == 0) add_edge([&](int b) { return b * (q + 1); });
    if (ex == n - 1) add_edge([&](int b) { return b * (q + 1) + q; });
  }
  return out;
}

template <class S>
SparseMatrix<S> BilinearForm<S>::assemble() const {
  const FeSpace& sp = *space;
  const int nl = sp.local_size();
  const int ne = sp.fine().num_elements();
  std::vector<Triplet<S>> t;
  t.reserve(static_cast<std::size_t>(ne) * nl * nl);
  std::vector<int> dofs(nl);
  for (int e = 0; e < ne; ++e) {
    DenseMatrix<S> ke = element_matrix(e);
    sp.element_dofs(e, dofs.data());
    for (int c = 0; c < nl; ++c)
      for (int r = 0; r < nl; ++r) t.emplace_back(dofs[r], dofs[c], ke(r, c));
  }
  return lod::assemble<S>(sp.num_dofs(), sp.num_dofs(), std::move(t));
}

template struct BilinearForm<double>;
template struct BilinearForm<Complex>;

BilinearForm<double> diffusion_form(const FeSpace& space, const CoefficientField& a) {
  BilinearForm<double> form;
  form.space = &space;
  form.stiffness_weight = coefficient_per_element(space, a);
  return form;
}

BilinearForm<double> diffusion_reaction_form(const FeSpace& space, const CoefficientField& v) {
  BilinearForm<double> form;
  form.space = &space;
  form.stiffness_weight.assign(static_cast<std::size_t>(space.fine().num_elements()), 1.0);
  form.mass_weight = coefficient_per_element(space, v);
  return form;
}

SparseMatrix<double> assemble_stiffness(const FeSpace& space, const CoefficientField& a) {
  return diffusion_form(space, a).assemble();
}

SparseMatrix<double> assemble_mass(const FeSpace& space, const CoefficientField& weight) {
  BilinearForm<double> form;
  form.space = &space;
  form.stiffness_weight.assign(static_cast<std::size_t>(space.fine().num_elements()), 0.0);
  form.mass_weight = coefficient_per_element(space, weight);
  return form.assemble();
}

SparseMatrix<double> assemble_mass(const FeSpace& space, double weight) {
  return assemble_mass(space, CoefficientField::constant(space.fine().domain(), weight));
}

SparseMatrix<double> assemble_boundary_mass(const FeSpace& space, double weight) {
  BilinearForm<double> form;
  form.space = &space;
  form.stiffness_weight.assign(static_cast<std::size_t>(space.fine().num_elements()), 0.0);
  form.boundary_weight = weight;
  SparseMatrix<double> m = form.assemble();
  m.prune(0.0);
  return m;
}

Vector<double> interpolate(const FeSpace& space, const ScalarFunction& f) {
  Vector<double> v(space.num_dofs());
  for (int k = 0; k < space.num_dofs(); ++k) {
    auto x = space.dof_coords(k);
    v(k) = f(x[0], x[1]);
  }
  return v;
}

Vector<double> solve_reference(const FeSpace& space, const CoefficientField& a, const ScalarFunction& f) {
  if (space.boundary_condition() != BoundaryCondition::dirichlet_zero)
    throw std::invalid_argument("reference solve needs a space with zero Dirichlet data");
  const auto& free = space.free_dofs();
  Vector<double> load = assemble_mass(space) * interpolate(space, f);
  SparseMatrix<double> k = submatrix(assemble_stiffness(space, a), free, free);
  return scatter<double>(solve_spd(k, gather(load, free)), free, space.num_dofs());
}

template <class S>
Vector<S> gather(const Vector<S>& v, const std::vector<int>& idx) {
  Vector<S> out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(i) = v(idx[i]);
  return out;
}

template <class S>
Vector<S> scatter(const Vector<S>& local, const std::vector<int>& idx, int n) {
  Vector<S> out = Vector<S>::Zero(n);
  for (std::size_t i = 0; i < idx.size(); ++i) out(idx[i]) = local(i);
  return out;
}

template <class S>
SparseMatrix<S> submatrix(const SparseMatrix<S>& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  std::vector<int> row_map(static_cast<std::size_t>(m.rows()), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) row_map[rows[i]] = static_cast<int>(i);
  const bool ascending = std::is_sorted(rows.begin(), rows.end());
  SparseMatrix<S> out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  std::vector<int> outer(cols.size() + 1, 0), inner;
  std::vector<S> values;
  std::vector<std::pair<int, S>> column;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    column.clear();
    for (typename SparseMatrix<S>::InnerIterator it(m, cols[c]); it; ++it) {
      int r = row_map[it.row()];
      if (r >= 0) column.emplace_back(r, it.value());
    }
    if (!ascending)
      std::sort(column.begin(), column.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [r, v] : column) {
      inner.push_back(r);
      values.push_back(v);
    }
    outer[c + 1] = static_cast<int>(inner.size());
  }
  out.resizeNonZeros(static_cast<Eigen::Index>(inner.size()));
  std::copy(outer.begin(), outer.end(), out.outerIndexPtr());
  std::copy(inner.begin(), inner.end(), out.innerIndexPtr());
  std::copy(values.begin(), values.end(), out.valuePtr());
  return out;
}

template Vector<double> gather(const Vector<double>&, const std::vector<int>&);
template Vector<Complex> gather(const Vector<Complex>&, const std::vector<int>&);
template Vector<double> scatter(const Vector<double>&, const std::vector<int>&, int);
template Vector<Complex> scatter(const Vector<Complex>&, const std::vector<int>&, int);
template SparseMatrix<double> submatrix(const SparseMatrix<double>&, const std::vector<int>&, const std::vector<int>&);
template SparseMatrix<Complex> submatrix(const SparseMatrix<Complex>&, const std::vector<int>&,
                                         const std::vector<int>&);

NormEvaluator::NormEvaluator(const FeSpace& space, const CoefficientField& a)
    : k_(assemble_stiffness(space, a)),
      m_(assemble_mass(space)),
      k1_(assemble_stiffness(space, CoefficientField::constant(space.fine().domain(), 1.0))) {}

Norms NormEvaluator::operator()(const Vector<double>& u) const {
  auto q = [&](const SparseMatrix<double>& m) { return std::sqrt(std::max(0.0, u.dot(m * u))); };
  return {q(m_), q(k_), q(k1_)};
}

Norms norms(const FeSpace& space, const Vector<double>& u, const CoefficientField& a) {
  return NormEvaluator(space, a)(u);
}

}  // namespace lod
