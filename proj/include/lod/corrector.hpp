#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "lod/constraints.hpp"
#include "lod/fem.hpp"
#include "lod/interp.hpp"
#include "lod/linalg.hpp"

namespace lod {

/// Oversampling value selecting the prototypical (non-localized) basis.
inline constexpr int global_ell = -1;

/// Localized multiscale basis. Column j of `phi` holds the fine dofs of phi_j.
template <class S>
struct LodBasis {
  ConstraintMode mode = ConstraintMode::dg;
  int p = 1;
  int ell = global_ell;
  int coarse_n = 0;
  int fine_n = 0;
  int q = 1;
  SparseMatrix<S> phi;

  int size() const { return static_cast<int>(phi.cols()); }
  int num_dofs() const { return static_cast<int>(phi.rows()); }
  Vector<S> function(int j) const { return Vector<S>(phi.col(j)); }
  Vector<S> combine(const Vector<S>& coeffs) const { return phi * coeffs; }
};

/// Saddle point problem of one element on its oversampling patch.
template <class S>
struct LocalProblem {
  int element = 0;
  Patch patch;
  std::vector<int> dofs;         // fine dofs, ascending
  std::vector<int> constraints;  // constraint functions, ascending
  SparseMatrix<S> a;
  SparseMatrix<S> b;
  std::shared_ptr<KktFactorization<S>> kkt;
};

template <class S>
struct ElementCorrector {
  int j = 0;
  Vector<S> psi;     // over LocalProblem::dofs
  Vector<S> lambda;  // over LocalProblem::constraints
};

/// Computes element correctors and assembles localized bases for one fine
/// space, constraint space and bilinear form. All inputs must outlive the
/// builder.
template <class S>
class CorrectorBuilder {
 public:
  CorrectorBuilder(const FeSpace& fe, const ConstraintSpace& space, const QuasiInterpolator& interp,
                   const BilinearForm<S>& form);

  const SparseMatrix<S>& a() const { return a_; }
  const SparseMatrix<double>& b() const { return b_; }

  /// Constraint functions j whose corrector on T can be nonzero: the
  /// functions living on T and those whose interpolant touches T.
  std::vector<int> work_set(int element) const;

  /// Throws ConstraintRankError if the local constraint block loses rank.
  LocalProblem<S> local_problem(int element, int ell) const;

  std::vector<ElementCorrector<S>> solve_element_correctors(const LocalProblem<S>& lp,
                                                            const std::vector<int>& js) const;

  /// phi_j = sum_z kappa_zj Lambda_z^1 - sum_T psi_{j,T}. The result does not
  /// depend on the number of threads.
  LodBasis<S> assemble_basis(int ell, int threads = 1) const;

  /// Prototypical basis: phi_j solves the global saddle problem with
  /// right-hand side (0, e_j). Returns the multipliers as well when asked.
  LodBasis<S> global_basis(DenseMatrix<S>* multipliers = nullptr) const;

  /// Fine function of sum_z kappa_zj Lambda_z^1.
  Vector<S> interpolant_of_dual(int j) const;

 private:
  void verify_rank(const LocalProblem<S>& lp) const;
  // a_T(Lambda_z^1, .) for the four vertex hats of T, over all dofs of T.
  std::array<std::vector<std::pair<int, S>>, 4> vertex_loads(int element) const;

  const FeSpace& fe_;
  const ConstraintSpace& space_;
  const QuasiInterpolator& interp_;
  const BilinearForm<S>& form_;
  bool zero_on_boundary_;
  SparseMatrix<S> a_;
  SparseMatrix<double> b_;
  SparseMatrix<double> kappa_t_;  // J x nodes

  mutable std::mutex rank_mutex_;
  mutable std::map<std::tuple<int, int, int>, int> rank_cache_;
};

/// c_T(v, mu) = sum_j |T cap omega_j|/|omega_j| mu_j q_j(v) - int_T mu I_H v,
/// from the QOI vector of v and the coefficients of mu.
double c_t(const ConstraintSpace& space, const QuasiInterpolator& interp, int element, const Vector<double>& qoi_v,
           const Vector<double>& mu);

}  // namespace lod
