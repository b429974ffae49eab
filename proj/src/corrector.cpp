#include "lod/corrector.hpp"

#include <algorithm>
#include <iostream>
#include <stdexcept>
#include <string>

#include "lod/errors.hpp"
#include "parallel.hpp"

namespace lod {

namespace {

int position(const std::vector<int>& sorted, int value) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), value);
  return (it != sorted.end() && *it == value) ? static_cast<int>(it - sorted.begin()) : -1;
}

template <class S>
SparseMatrix<S> columns_to_matrix(int rows, const std::vector<Eigen::SparseVector<S, Eigen::ColMajor, int>>& cols) {
  SparseMatrix<S> m(rows, static_cast<int>(cols.size()));
  Eigen::Index nnz = 0;
  for (const auto& c : cols) nnz += c.nonZeros();
  m.resizeNonZeros(nnz);
  Eigen::Index k = 0;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    m.outerIndexPtr()[j] = static_cast<int>(k);
    const auto& c = cols[j];
    std::copy(c.innerIndexPtr(), c.innerIndexPtr() + c.nonZeros(), m.innerIndexPtr() + k);
    std::copy(c.valuePtr(), c.valuePtr() + c.nonZeros(), m.valuePtr() + k);
    k += c.nonZeros();
  }
  m.outerIndexPtr()[cols.size()] = static_cast<int>(k);
  return m;
}


}  // namespace

template <class S>
CorrectorBuilder<S>::CorrectorBuilder(const FeSpace& fe, const ConstraintSpace& space, const QuasiInterpolator& interp,
                                      const BilinearForm<S>& form)
    : fe_(fe),
      space_(space),
      interp_(interp),
      form_(form),
      zero_on_boundary_(fe.boundary_condition() == BoundaryCondition::dirichlet_zero),
      a_(form.assemble()),
      b_(assemble_b(space, fe)),
      kappa_t_(interp.kappa().transpose()) {
  const int r = fe.refinement().ratio;
  if (r < 2 * (space.degree() + 1))
    std::cerr << "warning: refinement ratio " << r << " is below 2(p+1) = " << 2 * (space.degree() + 1)
              << "; local constraint blocks may lose rank\n";
}

template <class S>
std::vector<int> CorrectorBuilder<S>::work_set(int element) const {
  std::vector<int> js = space_.element_functions(element);
  for (int z : space_.mesh().element_nodes(element))
    for (SparseMatrix<double>::InnerIterator it(kappa_t_, z); it; ++it) js.push_back(it.row());
  std::sort(js.begin(), js.end());
  js.erase(std::unique(js.begin(), js.end()), js.end());
  return js;
}

template <class S>
void CorrectorBuilder<S>::verify_rank(const LocalProblem<S>& lp) const {
  const CartesianMesh& mesh = space_.mesh();
  int i0 = mesh.n(), i1 = -1, j0 = mesh.n(), j1 = -1;
  for (int e : lp.patch.elements) {
    auto [i, j] = mesh.element_ij(e);
    i0 = std::min(i0, i);
    i1 = std::max(i1, i);
    j0 = std::min(j0, j);
    j1 = std::max(j1, j);
  }
  int touch = (i0 == 0) | (i1 == mesh.n() - 1) << 1 | (j0 == 0) << 2 | (j1 == mesh.n() - 1) << 3;
  auto key = std::make_tuple(i1 - i0 + 1, j1 - j0 + 1, touch);
  const bool rectangle = static_cast<int>(lp.patch.size()) == (i1 - i0 + 1) * (j1 - j0 + 1);
  int deficient = -1;
  if (rectangle) {
    std::lock_guard lock(rank_mutex_);
    auto it = rank_cache_.find(key);
    if (it != rank_cache_.end()) deficient = it->second;
  }
  if (deficient < 0) {
    deficient = static_cast<int>(lp.b.rows()) > static_cast<int>(lp.b.cols())
                    ? static_cast<int>(lp.b.rows() - lp.b.cols())
                    : constraint_rank_deficiency(lp.b);
    if (rectangle) {
      std::lock_guard lock(rank_mutex_);
      rank_cache_[key] = deficient;
    }
  }
  if (deficient > 0)
    throw ConstraintRankError("local problem of element " + std::to_string(lp.element) + ": " +
                                  std::to_string(lp.b.rows()) + " constraints on " + std::to_string(lp.b.cols()) +
                                  " fine dofs, rank deficient by " + std::to_string(deficient) +
                                  " rows; refine the fine mesh relative to H and p",
                              deficient);
}

template <class S>
LocalProblem<S> CorrectorBuilder<S>::local_problem(int element, int ell) const {
  if (ell < 1) throw std::invalid_argument("oversampling order must be at least 1");
  LocalProblem<S> lp;
  lp.element = element;
  lp.patch = patch(space_.mesh(), element, ell);
  lp.dofs = fine_dofs_in_patch(fe_.refinement(), lp.patch, fe_.degree(), zero_on_boundary_);
  lp.constraints = restrict_to_patch(space_, lp.patch);
  lp.a = submatrix(a_, lp.dofs, lp.dofs);
  lp.b = submatrix(b_, lp.constraints, lp.dofs).template cast<S>();
  verify_rank(lp);
  lp.kkt = std::make_shared<KktFactorization<S>>(lp.a, lp.b);
  return lp;
}

template <class S>
std::array<std::vector<std::pair<int, S>>, 4> CorrectorBuilder<S>::vertex_loads(int element) const {
  const int q = fe_.degree();
  const int stride = fe_.refinement().ratio * q;
  const int nl = fe_.local_size();
  auto [ci, cj] = space_.mesh().element_ij(element);
  const int box = stride + 1;
  std::array<std::vector<S>, 4> acc;
  for (auto& a : acc) a.assign(static_cast<std::size_t>(box) * box, S(0));
  std::vector<int> dofs(nl);
  Vector<S> vals(nl);
  for (int e : fe_.refinement().children(element)) {
    DenseMatrix<S> ke = form_.element_matrix(e);
    fe_.element_dofs(e, dofs.data());
    std::vector<std::pair<int, int>> rel(nl);
    for (int l = 0; l < nl; ++l) {
      auto [gx, gy] = fe_.dof_xy(dofs[l]);
      rel[l] = {gx - ci * stride, gy - cj * stride};
    }
    for (int c = 0; c < 4; ++c) {
      for (int l = 0; l < nl; ++l) {
        double s = static_cast<double>(rel[l].first) / stride, t = static_cast<double>(rel[l].second) / stride;
        double hs = (c & 1) ? s : 1 - s, ht = (c & 2) ? t : 1 - t;
        vals(l) = S(hs * ht);
      }
      Vector<S> y = ke * vals;
      for (int l = 0; l < nl; ++l) acc[c][static_cast<std::size_t>(rel[l].second) * box + rel[l].first] += y(l);
    }
  }
  std::array<std::vector<std::pair<int, S>>, 4> out;
  for (int c = 0; c < 4; ++c)
    for (int y = 0; y < box; ++y)
      for (int x = 0; x < box; ++x)
        out[c].emplace_back(fe_.dof(ci * stride + x, cj * stride + y), acc[c][static_cast<std::size_t>(y) * box + x]);
  return out;
}

template <class S>
std::vector<ElementCorrector<S>> CorrectorBuilder<S>::solve_element_correctors(const LocalProblem<S>& lp,
                                                                              const std::vector<int>& js) const {
  const int T = lp.element;
  const int n = static_cast<int>(lp.dofs.size()), m = static_cast<int>(lp.constraints.size());
  auto nodes = space_.mesh().element_nodes(T);

  auto loads = vertex_loads(T);
  std::array<Vector<S>, 4> f_c;
  for (int c = 0; c < 4; ++c) {
    f_c[c] = Vector<S>::Zero(n);
    for (const auto& [dof, v] : loads[c]) {
      int k = position(lp.dofs, dof);
      if (k >= 0) f_c[c](k) += v;
    }
  }
  const auto& g_coupling = space_.vertex_coupling();
  std::vector<int> own_pos(space_.local_count());
  for (int l = 0; l < space_.local_count(); ++l) own_pos[l] = position(lp.constraints, space_.element_function(T, l));

  std::vector<ElementCorrector<S>> out;
  out.reserve(js.size());
  for (int j : js) {
    std::array<double, 4> kap;
    for (int c = 0; c < 4; ++c) kap[c] = kappa_t_.coeff(j, nodes[c]);
    Vector<S> f = Vector<S>::Zero(n);
    for (int c = 0; c < 4; ++c)
      if (kap[c] != 0.0) f += S(kap[c]) * f_c[c];
    Vector<S> g = Vector<S>::Zero(m);
    for (int l = 0; l < space_.local_count(); ++l) {
      double v = 0.0;
      for (int c = 0; c < 4; ++c) v += kap[c] * g_coupling(l, c);
      if (space_.element_function(T, l) == j) v -= space_.weight(T, j);
      g(own_pos[l]) += S(v);
    }
    auto [psi, lambda] = lp.kkt->solve(f, g);
    out.push_back({j, std::move(psi), std::move(lambda)});
  }
  return out;
}

template <class S>
Vector<S> CorrectorBuilder<S>::interpolant_of_dual(int j) const {
  Vector<double> nodal = Vector<double>(kappa_t_.row(j).transpose());
  return (interp_.prolongation() * nodal).template cast<S>();
}

template <class S>
LodBasis<S> CorrectorBuilder<S>::assemble_basis(int ell, int threads) const {
  if (ell == global_ell) return global_basis();
  if (ell < 1) throw std::invalid_argument("oversampling order must be at least 1");
  using SpVec = Eigen::SparseVector<S, Eigen::ColMajor, int>;
  const int J = space_.size();
  const int nd = fe_.num_dofs();
  const int ne = space_.mesh().num_elements();

  std::vector<SpVec> cols(J);
  SparseMatrix<S> base = (interp_.prolongation() * interp_.kappa()).template cast<S>();
  for (int j = 0; j < J; ++j) cols[j] = base.col(j);

  struct Result {
    std::vector<int> dofs;
    std::vector<ElementCorrector<S>> correctors;
  };
  const int block = std::max(8, 4 * threads);
  std::vector<Result> results;
  for (int start = 0; start < ne; start += block) {
    const int count = std::min(block, ne - start);
    results.assign(count, Result{});
    detail::parallel_for(count, threads, [&](int i) {
      int T = start + i;
      LocalProblem<S> lp = local_problem(T, ell);
      results[i].correctors = solve_element_correctors(lp, work_set(T));
      results[i].dofs = std::move(lp.dofs);
    });
    // Reduce in element order so the sum is independent of the schedule.
    for (int i = 0; i < count; ++i) {
      const auto& res = results[i];
      for (const auto& ec : res.correctors) {
        SpVec v(nd);
        v.reserve(static_cast<Eigen::Index>(res.dofs.size()));
        for (std::size_t k = 0; k < res.dofs.size(); ++k) v.insertBack(res.dofs[k]) = ec.psi(static_cast<Eigen::Index>(k));
        cols[ec.j] = SpVec(cols[ec.j] - v);
      }
    }
  }
  LodBasis<S> basis;
  basis.mode = space_.mode();
  basis.p = space_.degree();
  basis.ell = ell;
  basis.coarse_n = space_.mesh().n();
  basis.fine_n = fe_.fine().n();
  basis.q = fe_.degree();
  basis.phi = columns_to_matrix<S>(nd, cols);
  return basis;
}

template <class S>
LodBasis<S> CorrectorBuilder<S>::global_basis(DenseMatrix<S>* multipliers) const {
  const auto& free = fe_.free_dofs();
  const int J = space_.size();
  SparseMatrix<S> a = submatrix(a_, free, free);
  std::vector<int> all(J);
  for (int j = 0; j < J; ++j) all[j] = j;
  SparseMatrix<S> b = submatrix(b_, all, free).template cast<S>();
  check_constraint_rank(b);
  KktFactorization<S> kkt(a, b);

  using SpVec = Eigen::SparseVector<S, Eigen::ColMajor, int>;
  std::vector<SpVec> cols(J);
  if (multipliers) multipliers->resize(J, J);
  const Vector<S> zero = Vector<S>::Zero(static_cast<Eigen::Index>(free.size()));
  for (int j = 0; j < J; ++j) {
    Vector<S> g = Vector<S>::Zero(J);
    g(j) = S(1);
    auto [x, lambda] = kkt.solve(zero, g);
    SpVec v(fe_.num_dofs());
    v.reserve(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k)
      if (x(k) != S(0)) v.insertBack(free[k]) = x(k);
    cols[j] = std::move(v);
    if (multipliers) multipliers->col(j) = lambda;
  }
  LodBasis<S> basis;
  basis.mode = space_.mode();
  basis.p = space_.degree();
  basis.ell = global_ell;
  basis.coarse_n = space_.mesh().n();
  basis.fine_n = fe_.fine().n();
  basis.q = fe_.degree();
  basis.phi = columns_to_matrix<S>(fe_.num_dofs(), cols);
  return basis;
}

template class CorrectorBuilder<double>;
template class CorrectorBuilder<Complex>;

double c_t(const ConstraintSpace& space, const QuasiInterpolator& interp, int element, const Vector<double>& qoi_v,
           const Vector<double>& mu) {
  auto nodes = space.mesh().element_nodes(element);
  Vector<double> all_nodal = interp.nodal_values(qoi_v);
  std::array<double, 4> nodal{};
  for (int c = 0; c < 4; ++c) nodal[c] = all_nodal(nodes[c]);
  const auto& g = space.vertex_coupling();
  double out = 0.0;
  for (int l = 0; l < space.local_count(); ++l) {
    int j = space.element_function(element, l);
    double ih = 0.0;
    for (int c = 0; c < 4; ++c) ih += nodal[c] * g(l, c);
    out += mu(j) * (space.weight(element, j) * qoi_v(j) - ih);
  }
  return out;
}

}  // namespace lod
