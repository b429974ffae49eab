#pragma once

#include "lod/constraints.hpp"
#include "lod/corrector.hpp"
#include "lod/fem.hpp"
#include "lod/lodsolve.hpp"

namespace lod {

/// -div(A grad u) - kappa^2 V^2 u = f in the domain, A grad u . n - i kappa sigma u = 0 on its boundary.
struct HelmholtzProblem {
  CoefficientField a;
  CoefficientField v;
  double sigma = 1.0;
  double kappa = 1.0;
  ScalarFunction f;
};

/// Unit coefficients on the unit square with the given wavenumber and source.
HelmholtzProblem homogeneous_helmholtz(double kappa, ScalarFunction f);

/// Element form of a(u, v) = (A grad u, grad v) - kappa^2 (V^2 u, v) - i kappa sigma (u, v)_boundary.
/// The space must carry the robin tag.
BilinearForm<Complex> helmholtz_form(const FeSpace& fe, const HelmholtzProblem& prob);

/// Complex symmetric matrix of helmholtz_form over all dofs.
SparseMatrix<Complex> assemble_helmholtz(const FeSpace& fe, const HelmholtzProblem& prob);

/// Load vector (f, phi_k) from the nodal interpolant of f.
Vector<Complex> helmholtz_load(const FeSpace& fe, const HelmholtzProblem& prob);

/// ||v||_kappa^2 = ||A^{1/2} grad v||^2 + kappa^2 ||V v||^2.
class KappaNorm {
 public:
  KappaNorm(const FeSpace& fe, const HelmholtzProblem& prob);
  double operator()(const Vector<Complex>& v) const;

 private:
  SparseMatrix<double> k_, m_;
  double kappa2_;
};

/// Fine finite element solution. Throws SingularSystemError if the matrix is
/// numerically singular.
Vector<Complex> solve_helmholtz_reference(const FeSpace& fe, const HelmholtzProblem& prob);

/// min over w in ker B of Re a(w, w) / ||grad w||^2. Positive values certify
/// coercivity on the fine-scale space. Throws SizeError when the kernel has
/// more than 4000 dimensions.
double coercivity_diagnostic(const FeSpace& fe, const HelmholtzProblem& prob, const ConstraintSpace& space);

struct HelmholtzResult {
  Vector<Complex> coefficients;
  Vector<Complex> fine;
  Vector<Complex> reference;
  double err_kappa_rel = 0.0;
  int coarse_dofs = 0;
  int fine_dofs = 0;
};

/// Petrov-Galerkin LOD with test functions conj(phi_i):
///   sum_j a(phi_j, conj(phi_i)) c_j = (f, conj(phi_i)).
/// Compares against the fine reference in the kappa norm; the reference is
/// computed unless given.
HelmholtzResult solve_helmholtz_lod(const FeSpace& fe, const HelmholtzProblem& prob, const ConstraintSpace& space,
                                    int ell, int threads = 1, const Vector<Complex>* reference = nullptr);

}  // namespace lod
