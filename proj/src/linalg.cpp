#include "lod/linalg.hpp"

#include <umfpack.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lod/errors.hpp"

namespace lod {

namespace {

inline bool value_less(double a, double b) { return a < b; }
inline bool value_less(const Complex& a, const Complex& b) {
  return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
}

template <class S>
double max_abs(const SparseMatrix<S>& m) {
  double out = 0.0;
  for (int k = 0; k < m.nonZeros(); ++k) out = std::max(out, std::abs(m.valuePtr()[k]));
  return out;
}

}  // namespace

template <class S>
SparseMatrix<S> assemble(int rows, int cols, std::vector<Triplet<S>> triplets) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
  for (const auto& t : triplets)
    if (t.row() < 0 || t.row() >= rows || t.col() < 0 || t.col() >= cols)
      throw std::invalid_argument("triplet (" + std::to_string(t.row()) + ", " + std::to_string(t.col()) +
                                  ") outside a " + std::to_string(rows) + " x " + std::to_string(cols) + " matrix");
  std::sort(triplets.begin(), triplets.end(), [](const Triplet<S>& a, const Triplet<S>& b) {
    if (a.col() != b.col()) return a.col() < b.col();
    if (a.row() != b.row()) return a.row() < b.row();
    return value_less(a.value(), b.value());
  });

  SparseMatrix<S> m(rows, cols);
  std::vector<int> outer(static_cast<std::size_t>(cols) + 1, 0);
  std::vector<int> inner;
  std::vector<S> values;
  inner.reserve(triplets.size());
  values.reserve(triplets.size());
  for (std::size_t k = 0; k < triplets.size();) {
    const int r = triplets[k].row(), c = triplets[k].col();
    S sum = triplets[k].value();
    std::size_t l = k + 1;
    for (; l < triplets.size() && triplets[l].row() == r && triplets[l].col() == c; ++l) sum += triplets[l].value();
    inner.push_back(r);
    values.push_back(sum);
    ++outer[c + 1];
    k = l;
  }
  for (int c = 0; c < cols; ++c) outer[c + 1] += outer[c];
  m.resizeNonZeros(static_cast<Eigen::Index>(inner.size()));
  std::copy(outer.begin(), outer.end(), m.outerIndexPtr());
  std::copy(inner.begin(), inner.end(), m.innerIndexPtr());
  std::copy(values.begin(), values.end(), m.valuePtr());
  return m;
}

template <class S>
double symmetry_defect(const SparseMatrix<S>& m) {
  double scale = max_abs(m);
  if (scale == 0.0) return 0.0;
  SparseMatrix<S> d = SparseMatrix<S>(m.transpose()) - m;
  return max_abs(d) / scale;
}

SpdFactorization::SpdFactorization(const SparseMatrix<double>& m) : n_(static_cast<int>(m.rows())) {
  if (m.rows() != m.cols()) throw std::invalid_argument("SPD factorization needs a square matrix");
  ldlt_.compute(m);
  if (ldlt_.info() != Eigen::Success) throw NumericalBreakdown("sparse LDL^T factorization failed", -1);
  const auto& d = ldlt_.vectorD();
  double dmax = d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    if (!(d(k) > 1e-14 * dmax)) {
      long row = ldlt_.permutationPinv().indices()(k);
      throw NumericalBreakdown("matrix is not positive definite: pivot " + std::to_string(d(k)) + " at row " +
                                   std::to_string(row),
                               row);
    }
  }
}

Vector<double> SpdFactorization::solve(const Vector<double>& rhs) const {
  if (rhs.size() != n_) throw std::invalid_argument("right-hand side size mismatch");
  return ldlt_.solve(rhs);
}

Vector<double> solve_spd(const SparseMatrix<double>& m, const Vector<double>& rhs) {
  return SpdFactorization(m).solve(rhs);
}

namespace {

template <class S>
struct Umf;

template <>
struct Umf<double> {
  static int symbolic(const SparseMatrix<double>& m, void** sym, const double* control, double* info) {
    int n = static_cast<int>(m.rows());
    return umfpack_di_symbolic(n, n, m.outerIndexPtr(), m.innerIndexPtr(), m.valuePtr(), sym, control, info);
  }
  static int numeric(const SparseMatrix<double>& m, void* sym, void** num, const double* control, double* info) {
    return umfpack_di_numeric(m.outerIndexPtr(), m.innerIndexPtr(), m.valuePtr(), sym, num, control, info);
  }
  static int solve(const SparseMatrix<double>& m, void* num, double* x, const double* b, const double* control,
                   double* info) {
    return umfpack_di_solve(UMFPACK_A, m.outerIndexPtr(), m.innerIndexPtr(), m.valuePtr(), x, b, num, control,
                            info);
  }
  static void defaults(double* control) { umfpack_di_defaults(control); }
  static void free_symbolic(void** s) { umfpack_di_free_symbolic(s); }
  static void free_numeric(void** s) { umfpack_di_free_numeric(s); }
};

template <>
struct Umf<Complex> {
  static const double* raw(const Complex* p) { return reinterpret_cast<const double*>(p); }
  static double* raw(Complex* p) { return reinterpret_cast<double*>(p); }

  static int symbolic(const SparseMatrix<Complex>& m, void** sym, const double* control, double* info) {
    int n = static_cast<int>(m.rows());
    return umfpack_zi_symbolic(n, n, m.outerIndexPtr(), m.innerIndexPtr(), raw(m.valuePtr()), nullptr, sym, control,
                               info);
  }
  static int numeric(const SparseMatrix<Complex>& m, void* sym, void** num, const double* control, double* info) {
    return umfpack_zi_numeric(m.outerIndexPtr(), m.innerIndexPtr(), raw(m.valuePtr()), nullptr, sym, num, control,
                              info);
  }
  static int solve(const SparseMatrix<Complex>& m, void* num, Complex* x, const Complex* b, const double* control,
                   double* info) {
    return umfpack_zi_solve(UMFPACK_A, m.outerIndexPtr(), m.innerIndexPtr(), raw(m.valuePtr()), nullptr, raw(x),
                            nullptr, raw(b), nullptr, num, control, info);
  }
  static void defaults(double* control) { umfpack_zi_defaults(control); }
  static void free_symbolic(void** s) { umfpack_zi_free_symbolic(s); }
  static void free_numeric(void** s) { umfpack_zi_free_numeric(s); }
};

}  // namespace

template <class S>
SparseLu<S>::SparseLu(SparseMatrix<S> m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("LU needs a square matrix");
  m_.makeCompressed();
  if (m_.rows() == 0) return;
  double control[UMFPACK_CONTROL], info[UMFPACK_INFO];
  Umf<S>::defaults(control);
  void* symbolic = nullptr;
  int status = Umf<S>::symbolic(m_, &symbolic, control, info);
  if (status != UMFPACK_OK) throw std::runtime_error("sparse LU symbolic analysis failed, status " + std::to_string(status));
  status = Umf<S>::numeric(m_, symbolic, &numeric_, control, info);
  Umf<S>::free_symbolic(&symbolic);
  if (status == UMFPACK_WARNING_singular_matrix) {
    singular_ = true;
  } else if (status != UMFPACK_OK) {
    if (numeric_) Umf<S>::free_numeric(&numeric_);
    throw std::runtime_error("sparse LU factorization failed, status " + std::to_string(status));
  }
  rcond_ = info[UMFPACK_RCOND];
}

template <class S>
SparseLu<S>::~SparseLu() {
  if (numeric_) Umf<S>::free_numeric(&numeric_);
}

template <class S>
Vector<S> SparseLu<S>::solve(const Vector<S>& rhs) const {
  if (rhs.size() != m_.rows()) throw std::invalid_argument("right-hand side size mismatch");
  Vector<S> x(rhs.size());
  if (rhs.size() == 0) return x;
  double control[UMFPACK_CONTROL], info[UMFPACK_INFO];
  Umf<S>::defaults(control);
  int status = Umf<S>::solve(m_, numeric_, x.data(), rhs.data(), control, info);
  if (status != UMFPACK_OK && status != UMFPACK_WARNING_singular_matrix)
    throw std::runtime_error("sparse LU solve failed, status " + std::to_string(status));
  return x;
}

template <class S>
int constraint_rank_deficiency(const SparseMatrix<S>& b, double tol) {
  const int m = static_cast<int>(b.rows());
  if (m == 0) return 0;
  SparseMatrix<S> rows = b;
  Vector<double> norms = Vector<double>::Zero(m);
  for (int c = 0; c < rows.outerSize(); ++c)
    for (typename SparseMatrix<S>::InnerIterator it(rows, c); it; ++it) norms(it.row()) += std::norm(it.value());
  int zero_rows = 0;
  for (int r = 0; r < m; ++r) {
    if (norms(r) == 0.0) {
      ++zero_rows;
      norms(r) = 1.0;
    } else {
      norms(r) = 1.0 / std::sqrt(norms(r));
    }
  }
  rows = norms.asDiagonal() * rows;
  SparseMatrix<S> gram_sparse = rows * SparseMatrix<S>(rows.adjoint());
  DenseMatrix<S> gram = DenseMatrix<S>(gram_sparse);
  Eigen::LDLT<DenseMatrix<S>> ldlt(gram);
  Vector<double> d = ldlt.vectorD().real().cwiseAbs();
  double dmax = d.maxCoeff();
  int deficient = 0;
  for (int k = 0; k < m; ++k)
    if (!(d(k) > tol * dmax)) ++deficient;
  return std::max(deficient, zero_rows);
}

template <class S>
void check_constraint_rank(const SparseMatrix<S>& b, double tol) {
  int deficient = constraint_rank_deficiency(b, tol);
  if (deficient > 0)
    throw ConstraintRankError("constraint matrix (" + std::to_string(b.rows()) + " x " + std::to_string(b.cols()) +
                                  ") is rank deficient by " + std::to_string(deficient) +
                                  " rows; the fine mesh is too coarse for the constraint space",
                              deficient);
}

template <class S>
KktFactorization<S>::KktFactorization(const SparseMatrix<S>& a, const SparseMatrix<S>& b)
    : n_(static_cast<int>(a.rows())), m_(static_cast<int>(b.rows())) {
  if (a.rows() != a.cols()) throw std::invalid_argument("KKT A-block must be square");
  if (b.cols() != a.rows() && m_ > 0)
    throw std::invalid_argument("KKT block sizes disagree: A is " + std::to_string(n_) + ", B has " +
                                std::to_string(b.cols()) + " columns");
  if (m_ > n_) {
    throw ConstraintRankError("more constraints (" + std::to_string(m_) + ") than unknowns (" + std::to_string(n_) +
                                  "); the fine mesh is too coarse for the constraint space",
                              m_ - n_);
  }
  if constexpr (std::is_same_v<S, double>) {
    if (m_ == 0) {
      spd_ = std::make_unique<SpdFactorization>(a);
      return;
    }
  }
  std::vector<Triplet<S>> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros() + 2 * b.nonZeros()));
  for (int c = 0; c < a.outerSize(); ++c)
    for (typename SparseMatrix<S>::InnerIterator it(a, c); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (int c = 0; c < b.outerSize(); ++c)
    for (typename SparseMatrix<S>::InnerIterator it(b, c); it; ++it) {
      t.emplace_back(n_ + it.row(), it.col(), it.value());
      t.emplace_back(it.col(), n_ + it.row(), it.value());
    }
  lu_ = std::make_unique<SparseLu<S>>(assemble<S>(n_ + m_, n_ + m_, std::move(t)));
  if (lu_->singular()) {
    check_constraint_rank(b);
    throw NumericalBreakdown("saddle point matrix is singular although the constraints have full rank", -1);
  }
}

template <class S>
std::pair<Vector<S>, Vector<S>> KktFactorization<S>::solve(const Vector<S>& f, const Vector<S>& g) const {
  if (f.size() != n_ || g.size() != m_) throw std::invalid_argument("KKT right-hand side size mismatch");
  if (spd_) {
    if constexpr (std::is_same_v<S, double>) return {spd_->solve(f), Vector<S>(0)};
  }
  Vector<S> rhs(n_ + m_);
  rhs << f, g;
  Vector<S> sol = lu_->solve(rhs);
  return {sol.head(n_), sol.tail(m_)};
}

std::pair<Vector<double>, Vector<double>> solve_kkt(const KktSystem& sys) {
  return KktFactorization<double>(sys.a, sys.b).solve(sys.f, sys.g);
}

template <class S>
std::pair<double, double> kkt_residual(const SparseMatrix<S>& a, const SparseMatrix<S>& b, const Vector<S>& f,
                                       const Vector<S>& g, const Vector<S>& x, const Vector<S>& lambda) {
  Vector<S> ax = a * x;
  Vector<S> btl = b.transpose() * lambda;
  Vector<S> bx = b * x;
  double s1 = std::max({f.norm(), ax.norm(), btl.norm()});
  double s2 = std::max(g.norm(), bx.norm());
  double r1 = (ax + btl - f).norm();
  double r2 = (bx - g).norm();
  return {s1 > 0 ? r1 / s1 : r1, s2 > 0 ? r2 / s2 : r2};
}

Vector<double> solve_dense_spd(const DenseMatrix<double>& m, const Vector<double>& rhs) {
  Eigen::LLT<DenseMatrix<double>> llt(m);
  if (llt.info() == Eigen::Success) return llt.solve(rhs);
  Eigen::LDLT<DenseMatrix<double>> ldlt(m);
  Eigen::VectorXi idx = Eigen::VectorXi::LinSpaced(m.rows(), 0, static_cast<int>(m.rows()) - 1);
  idx = ldlt.transpositionsP() * idx;
  const auto& d = ldlt.vectorD();
  for (Eigen::Index k = 0; k < d.size(); ++k)
    if (!(d(k) > 0.0))
      throw NumericalBreakdown("coarse matrix is not positive definite at row " + std::to_string(idx(k)), idx(k));
  throw NumericalBreakdown("coarse Cholesky factorization failed", -1);
}

Vector<Complex> solve_dense_general(const DenseMatrix<Complex>& m, const Vector<Complex>& rhs) {
  Eigen::PartialPivLU<DenseMatrix<Complex>> lu(m);
  double rcond = lu.rcond();
  if (!(rcond > 1e-14))
    throw SingularSystemError("coarse system is numerically singular (rcond " + std::to_string(rcond) + ")", rcond);
  return lu.solve(rhs);
}

template SparseMatrix<double> assemble(int, int, std::vector<Triplet<double>>);
template SparseMatrix<Complex> assemble(int, int, std::vector<Triplet<Complex>>);
template double symmetry_defect(const SparseMatrix<double>&);
template double symmetry_defect(const SparseMatrix<Complex>&);
template class SparseLu<double>;
template class SparseLu<Complex>;
template int constraint_rank_deficiency(const SparseMatrix<double>&, double);
template int constraint_rank_deficiency(const SparseMatrix<Complex>&, double);
template void check_constraint_rank(const SparseMatrix<double>&, double);
template void check_constraint_rank(const SparseMatrix<Complex>&, double);
template class KktFactorization<double>;
template class KktFactorization<Complex>;
template std::pair<double, double> kkt_residual(const SparseMatrix<double>&, const SparseMatrix<double>&,
                                                const Vector<double>&, const Vector<double>&, const Vector<double>&,
                                                const Vector<double>&);
template std::pair<double, double> kkt_residual(const SparseMatrix<Complex>&, const SparseMatrix<Complex>&,
                                                const Vector<Complex>&, const Vector<Complex>&,
                                                const Vector<Complex>&, const Vector<Complex>&);

}  // namespace lod
