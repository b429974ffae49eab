#include "lod/helmholtz.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "lod/errors.hpp"
#include "lod/interp.hpp"

namespace lod {

namespace {

void validate(const FeSpace& fe, const HelmholtzProblem& prob) {
  if (fe.boundary_condition() != BoundaryCondition::robin)
    throw std::invalid_argument("Helmholtz problems need a fine space with the robin tag");
  if (!(prob.kappa >= 0.0)) throw std::invalid_argument("wavenumber must be non-negative");
  if (!(prob.sigma > 0.0)) throw std::invalid_argument("boundary coefficient sigma must be positive");
  if (!(prob.v.min() > 0.0)) throw std::invalid_argument("potential V must be bounded away from zero");
  if (!(prob.a.min() > 0.0)) throw std::invalid_argument("diffusion coefficient must be positive");
}

}  // namespace

HelmholtzProblem homogeneous_helmholtz(double kappa, ScalarFunction f) {
  HelmholtzProblem prob;
  prob.a = CoefficientField::constant(Domain::unit_square(), 1.0);
  prob.v = CoefficientField::constant(Domain::unit_square(), 1.0);
  prob.kappa = kappa;
  prob.f = std::move(f);
  return prob;
}

BilinearForm<Complex> helmholtz_form(const FeSpace& fe, const HelmholtzProblem& prob) {
  validate(fe, prob);
  std::vector<double> a = coefficient_per_element(fe, prob.a);
  std::vector<double> v = coefficient_per_element(fe, prob.v);
  const double k2 = prob.kappa * prob.kappa;
  BilinearForm<Complex> form;
  form.space = &fe;
  form.stiffness_weight.resize(a.size());
  form.mass_weight.resize(v.size());
  for (std::size_t e = 0; e < a.size(); ++e) {
    form.stiffness_weight[e] = Complex(a[e], 0.0);
    form.mass_weight[e] = Complex(-k2 * v[e] * v[e], 0.0);
  }
  form.boundary_weight = Complex(0.0, -prob.kappa * prob.sigma);
  return form;
}

SparseMatrix<Complex> assemble_helmholtz(const FeSpace& fe, const HelmholtzProblem& prob) {
  return helmholtz_form(fe, prob).assemble();
}

Vector<Complex> helmholtz_load(const FeSpace& fe, const HelmholtzProblem& prob) {
  if (!prob.f) throw std::invalid_argument("Helmholtz problem has no source");
  Vector<double> load = assemble_mass(fe) * interpolate(fe, prob.f);
  return load.cast<Complex>();
}

KappaNorm::KappaNorm(const FeSpace& fe, const HelmholtzProblem& prob)
    : k_(assemble_stiffness(fe, prob.a)), kappa2_(prob.kappa * prob.kappa) {
  CoefficientField v2 = prob.v;
  for (double& x : v2.values) x *= x;
  m_ = assemble_mass(fe, v2);
}

double KappaNorm::operator()(const Vector<Complex>& v) const {
  Vector<double> re = v.real(), im = v.imag();
  double grad = re.dot(k_ * re) + im.dot(k_ * im);
  double mass = re.dot(m_ * re) + im.dot(m_ * im);
  return std::sqrt(std::max(0.0, grad + kappa2_ * mass));
}

Vector<Complex> solve_helmholtz_reference(const FeSpace& fe, const HelmholtzProblem& prob) {
  SparseLu<Complex> lu(assemble_helmholtz(fe, prob));
  if (lu.singular() || !(lu.rcond() > 1e-14))
    throw SingularSystemError("Helmholtz matrix is numerically singular (rcond " + std::to_string(lu.rcond()) + ")",
                              lu.rcond());
  return lu.solve(helmholtz_load(fe, prob));
}

double coercivity_diagnostic(const FeSpace& fe, const HelmholtzProblem& prob, const ConstraintSpace& space) {
  validate(fe, prob);
  const int n = fe.num_dofs();
  const int J = space.size();
  if (n - J > 4000)
    throw SizeError("coercivity diagnostic: kernel of B has at least " + std::to_string(n - J) +
                    " dimensions (limit 4000)");
  DenseMatrix<double> bt = DenseMatrix<double>(assemble_b(space, fe)).transpose();
  Eigen::ColPivHouseholderQR<DenseMatrix<double>> qr(bt);
  const int rank = static_cast<int>(qr.rank());
  if (n - rank > 4000)
    throw SizeError("coercivity diagnostic: kernel of B has " + std::to_string(n - rank) +
                    " dimensions (limit 4000)");
  DenseMatrix<double> q = qr.householderQ();
  DenseMatrix<double> z = q.rightCols(n - rank);

  CoefficientField v2 = prob.v;
  for (double& x : v2.values) x *= x;
  SparseMatrix<double> re_a =
      assemble_stiffness(fe, prob.a) - (prob.kappa * prob.kappa) * assemble_mass(fe, v2);
  SparseMatrix<double> grad = assemble_stiffness(fe, CoefficientField::constant(fe.fine().domain(), 1.0));
  DenseMatrix<double> lhs = z.transpose() * (re_a * z);
  DenseMatrix<double> rhs = z.transpose() * (grad * z);
  lhs = 0.5 * (lhs + lhs.transpose()).eval();
  rhs = 0.5 * (rhs + rhs.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix<double>> eig(lhs, rhs, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalBreakdown("coercivity diagnostic: eigensolver failed", -1);
  return eig.eigenvalues()(0);
}

HelmholtzResult solve_helmholtz_lod(const FeSpace& fe, const HelmholtzProblem& prob, const ConstraintSpace& space,
                                    int ell, int threads, const Vector<Complex>* reference) {
  BilinearForm<Complex> form = helmholtz_form(fe, prob);
  QuasiInterpolator interp(space, fe);
  CorrectorBuilder<Complex> builder(fe, space, interp, form);
  LodBasis<Complex> basis = builder.assemble_basis(ell, threads);

  Vector<Complex> load = helmholtz_load(fe, prob);
  CoarseMatrix<Complex> coarse = galerkin_product(fe, form, basis.phi, basis.phi, threads);
  Vector<Complex> coarse_load = basis.phi.transpose() * load;

  HelmholtzResult res;
  res.coefficients = solve_coarse(coarse, coarse_load);
  res.fine = basis.combine(res.coefficients);
  res.reference = reference ? *reference : solve_helmholtz_reference(fe, prob);
  KappaNorm norm(fe, prob);
  const double ref = norm(res.reference);
  res.err_kappa_rel = ref > 0.0 ? norm(Vector<Complex>(res.fine - res.reference)) / ref : norm(res.fine);
  res.coarse_dofs = basis.size();
  res.fine_dofs = fe.num_dofs();
  return res;
}

}  // namespace lod
