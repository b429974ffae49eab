#include "lod/lodsolve.hpp"

#include <algorithm>
#include <stdexcept>

#include "lod/errors.hpp"
#include "parallel.hpp"

namespace lod {

namespace {

// Columns of m with a nonzero on the closure of each coarse element.
template <class S>
std::vector<std::vector<int>> columns_per_element(const FeSpace& fe, const SparseMatrix<S>& m) {
  const int n = fe.coarse().n();
  const int stride = fe.refinement().ratio * fe.degree();
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < m.outerSize(); ++j) {
    for (typename SparseMatrix<S>::InnerIterator it(m, j); it; ++it) {
      auto [gx, gy] = fe.dof_xy(static_cast<int>(it.row()));
      int cx = gx / stride, cy = gy / stride;
      int x0 = (gx % stride == 0) ? std::max(cx - 1, 0) : cx, x1 = std::min(cx, n - 1);
      int y0 = (gy % stride == 0) ? std::max(cy - 1, 0) : cy, y1 = std::min(cy, n - 1);
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
          auto& list = out[static_cast<std::size_t>(y) * n + x];
          if (list.empty() || list.back() != j) list.push_back(j);
        }
    }
  }
  return out;
}

// Values of the listed columns on the dof box of coarse element (ci, cj).
template <class S>
DenseMatrix<S> extract_block(const FeSpace& fe, const SparseMatrix<S>& m, const std::vector<int>& cols, int ci,
                             int cj) {
  const int stride = fe.refinement().ratio * fe.degree();
  const int box = stride + 1;
  DenseMatrix<S> out = DenseMatrix<S>::Zero(box * box, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const int j = cols[c];
    const int* begin = m.innerIndexPtr() + m.outerIndexPtr()[j];
    const int* end = m.innerIndexPtr() + m.outerIndexPtr()[j + 1];
    const S* values = m.valuePtr() + m.outerIndexPtr()[j];
    for (int y = 0; y < box; ++y) {
      int lo = fe.dof(ci * stride, cj * stride + y), hi = lo + stride;
      for (const int* p = std::lower_bound(begin, end, lo); p != end && *p <= hi; ++p)
        out(y * box + (*p - lo), static_cast<Eigen::Index>(c)) = values[p - begin];
    }
  }
  return out;
}

template <class S>
DenseMatrix<S> element_block_matrix(const FeSpace& fe, const BilinearForm<S>& form, int coarse_element) {
  const int stride = fe.refinement().ratio * fe.degree();
  const int box = stride + 1;
  const int nl = fe.local_size();
  auto [ci, cj] = fe.coarse().element_ij(coarse_element);
  DenseMatrix<S> out = DenseMatrix<S>::Zero(box * box, box * box);
  std::vector<int> dofs(nl), loc(nl);
  for (int e : fe.refinement().children(coarse_element)) {
    DenseMatrix<S> ke = form.element_matrix(e);
    fe.element_dofs(e, dofs.data());
    for (int l = 0; l < nl; ++l) {
      auto [gx, gy] = fe.dof_xy(dofs[l]);
      loc[l] = (gy - cj * stride) * box + (gx - ci * stride);
    }
    for (int c = 0; c < nl; ++c)
      for (int r = 0; r < nl; ++r) out(loc[r], loc[c]) += ke(r, c);
  }
  return out;
}

}  // namespace

template <class S>
CoarseMatrix<S> galerkin_product(const FeSpace& fe, const BilinearForm<S>& form, const SparseMatrix<S>& left,
                                 const SparseMatrix<S>& right, int threads) {
  if (left.rows() != fe.num_dofs() || right.rows() != fe.num_dofs())
    throw std::invalid_argument("basis matrices do not match the fine space");
  const int ne = fe.coarse().num_elements();
  const int rows = static_cast<int>(left.cols()), cols = static_cast<int>(right.cols());
  auto lcols = columns_per_element(fe, left);
  auto rcols = columns_per_element(fe, right);

  CoarseMatrix<S> out;
  out.size = rows;
  out.is_dense = std::max(rows, cols) <= CoarseMatrix<S>::dense_limit;
  if (out.is_dense) out.dense = DenseMatrix<S>::Zero(rows, cols);
  std::vector<Triplet<S>> triplets;
  SparseMatrix<S> acc(rows, cols);
  // flushed per element so the summation order does not depend on the batch size
  const std::size_t flush_at = std::size_t{1} << 23;

  const int batch = std::max(4, 4 * threads);
  std::vector<DenseMatrix<S>> blocks;
  for (int start = 0; start < ne; start += batch) {
    const int count = std::min(batch, ne - start);
    blocks.assign(count, DenseMatrix<S>());
    detail::parallel_for(count, threads, [&](int i) {
      int K = start + i;
      if (lcols[K].empty() || rcols[K].empty()) return;
      auto [ci, cj] = fe.coarse().element_ij(K);
      DenseMatrix<S> ak = element_block_matrix(fe, form, K);
      DenseMatrix<S> lk = extract_block(fe, left, lcols[K], ci, cj);
      DenseMatrix<S> rk = extract_block(fe, right, rcols[K], ci, cj);
      DenseMatrix<S> ar = ak * rk;
      blocks[i] = lk.transpose() * ar;
    });
    for (int i = 0; i < count; ++i) {
      const int K = start + i;
      const auto& blk = blocks[i];
      if (blk.size() == 0) continue;
      for (std::size_t b = 0; b < rcols[K].size(); ++b)
        for (std::size_t a = 0; a < lcols[K].size(); ++a) {
          if (out.is_dense)
            out.dense(lcols[K][a], rcols[K][b]) += blk(a, b);
          else
            triplets.emplace_back(lcols[K][a], rcols[K][b], blk(a, b));
        }
      if (triplets.size() >= flush_at) {
        acc += assemble<S>(rows, cols, std::move(triplets));
        triplets.clear();
      }
    }
  }
  if (!out.is_dense) {
    acc += assemble<S>(rows, cols, std::move(triplets));
    out.sparse = std::move(acc);
  }
  return out;
}

template CoarseMatrix<double> galerkin_product(const FeSpace&, const BilinearForm<double>&,
                                               const SparseMatrix<double>&, const SparseMatrix<double>&, int);
template CoarseMatrix<Complex> galerkin_product(const FeSpace&, const BilinearForm<Complex>&,
                                                const SparseMatrix<Complex>&, const SparseMatrix<Complex>&, int);

Vector<double> solve_coarse(const CoarseMatrix<double>& m, const Vector<double>& rhs) {
  if (m.is_dense) return solve_dense_spd(m.dense, rhs);
  return solve_spd(m.sparse, rhs);
}

Vector<Complex> solve_coarse(const CoarseMatrix<Complex>& m, const Vector<Complex>& rhs) {
  if (m.is_dense) return solve_dense_general(m.dense, rhs);
  SparseLu<Complex> lu(m.sparse);
  if (lu.singular() || !(lu.rcond() > 1e-14))
    throw SingularSystemError("coarse system is numerically singular (rcond " + std::to_string(lu.rcond()) + ")",
                              lu.rcond());
  return lu.solve(rhs);
}

CoarseSystem assemble_coarse(const FeSpace& fe, const BilinearForm<double>& form, const LodBasis<double>& basis,
                             const Vector<double>& fine_load, int threads) {
  CoarseSystem sys;
  sys.stiffness = galerkin_product(fe, form, basis.phi, basis.phi, threads);
  sys.load = basis.phi.transpose() * fine_load;
  return sys;
}

LodSolution solve(const CoarseSystem& system, const LodBasis<double>& basis) {
  LodSolution sol;
  sol.coefficients = solve_coarse(system.stiffness, system.load);
  sol.fine = basis.combine(sol.coefficients);
  return sol;
}

GlobalLodSolver::GlobalLodSolver(const FeSpace& fe, const SparseMatrix<double>& a, const SparseMatrix<double>& b)
    : fe_(fe), J_(static_cast<int>(b.rows())) {
  const auto& free = fe.free_dofs();
  std::vector<int> all(J_);
  for (int j = 0; j < J_; ++j) all[j] = j;
  SparseMatrix<double> bf = submatrix(b, all, free);
  check_constraint_rank(bf);
  kkt_ = std::make_unique<KktFactorization<double>>(submatrix(a, free, free), bf);
}

CoarseSystem GlobalLodSolver::coarse_system(const Vector<double>& fine_load, int threads) const {
  const auto& free = fe_.free_dofs();
  Vector<double> load_free = gather(fine_load, free);
  const Vector<double> zero = Vector<double>::Zero(static_cast<Eigen::Index>(free.size()));
  CoarseSystem sys;
  sys.stiffness.size = J_;
  sys.stiffness.is_dense = true;
  sys.stiffness.dense.resize(J_, J_);
  sys.load.resize(J_);
  detail::parallel_for(J_, threads, [&](int j) {
    Vector<double> g = Vector<double>::Zero(J_);
    g(j) = 1.0;
    auto [x, lambda] = kkt_->solve(zero, g);
    sys.stiffness.dense.col(j) = -lambda;
    sys.load(j) = x.dot(load_free);
  });
  DenseMatrix<double> sym = 0.5 * (sys.stiffness.dense + sys.stiffness.dense.transpose());
  sys.stiffness.dense = std::move(sym);
  return sys;
}

Vector<double> GlobalLodSolver::reconstruct(const Vector<double>& coefficients) const {
  const auto& free = fe_.free_dofs();
  const Vector<double> zero = Vector<double>::Zero(static_cast<Eigen::Index>(free.size()));
  return scatter<double>(kkt_->solve(zero, coefficients).first, free, fe_.num_dofs());
}

LodSolution GlobalLodSolver::solve(const Vector<double>& fine_load, int threads) const {
  CoarseSystem sys = coarse_system(fine_load, threads);
  LodSolution sol;
  sol.coefficients = solve_coarse(sys.stiffness, sys.load);
  sol.fine = reconstruct(sol.coefficients);
  return sol;
}

RelativeErrors errors(const NormEvaluator& norms, const Vector<double>& u, const Vector<double>& reference) {
  Norms ref = norms(reference);
  if (ref.energy == 0.0 || ref.l2 == 0.0) throw std::invalid_argument("reference solution is zero");
  Norms diff = norms(Vector<double>(u - reference));
  return {diff.energy / ref.energy, diff.l2 / ref.l2};
}

}  // namespace lod
