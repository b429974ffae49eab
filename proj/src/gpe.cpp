#include "lod/gpe.hpp"

#include <cmath>
#include <functional>
#include <iostream>
#include <stdexcept>

#include "lod/interp.hpp"

namespace lod {

namespace {

void validate(const FeSpace& fe, const GpeProblem& prob) {
  if (fe.boundary_condition() != BoundaryCondition::dirichlet_zero)
    throw std::invalid_argument("ground states live in H^1_0; use a dirichlet_zero fine space");
  if (prob.potential.min() < 0.0) throw std::invalid_argument("potential must be non-negative");
  if (prob.interaction < 0.0) throw std::invalid_argument("interaction must be non-negative");
}

BilinearForm<double> mass_form(const FeSpace& fe) {
  BilinearForm<double> form;
  form.space = &fe;
  form.stiffness_weight.assign(static_cast<std::size_t>(fe.fine().num_elements()), 0.0);
  form.mass_weight.assign(static_cast<std::size_t>(fe.fine().num_elements()), 1.0);
  return form;
}

// Linear algebra of the discrete space the flow runs in.
struct FlowSpace {
  std::function<Vector<double>(const Vector<double>&)> apply_a, apply_m, solve_a, to_fine, from_fine;
};

GroundState run_flow(const FlowSpace& sp, const QuarticTerm& quartic, double kappa, Vector<double> c,
                     const FlowParams& params) {
  auto normalize = [&](Vector<double>& x) { x /= std::sqrt(x.dot(sp.apply_m(x))); };
  auto energy = [&](const Vector<double>& x, double& q) {
    q = quartic.integral(sp.to_fine(x));
    return 0.5 * x.dot(sp.apply_a(x)) + 0.25 * kappa * q;
  };

  GroundState gs;
  normalize(c);
  double q = 0.0;
  double e = energy(c, q);
  gs.energy_log.push_back(e);
  for (int it = 0; it < params.max_iter; ++it) {
    Vector<double> grad = sp.apply_a(c);
    if (kappa != 0.0) grad += kappa * sp.from_fine(quartic.cubic_load(sp.to_fine(c)));
    Vector<double> sobolev = sp.solve_a(grad);
    Vector<double> mc = sp.apply_m(c);
    Vector<double> w = sp.solve_a(mc);
    Vector<double> dir = sobolev - (mc.dot(sobolev) / mc.dot(w)) * w;

    double tau = params.step, qn = 0.0, en = e;
    Vector<double> next;
    bool accepted = false;
    for (int k = 0; k <= params.max_halvings; ++k, tau *= 0.5) {
      next = c - tau * dir;
      normalize(next);
      en = energy(next, qn);
      if (en < e) {
        accepted = true;
        break;
      }
    }
    ++gs.iterations;
    if (!accepted) {
      // no decrease representable in floating point
      gs.converged = true;
      gs.last_delta = 0.0;
      break;
    }
    gs.last_delta = e - en;
    c = std::move(next);
    e = en;
    q = qn;
    gs.energy_log.push_back(e);
    if (gs.last_delta <= params.tol) {
      gs.converged = true;
      break;
    }
  }
  if (!gs.converged)
    std::cerr << "warning: ground state flow stopped after " << gs.iterations
              << " iterations, last energy decrease " << gs.last_delta << "\n";

  Vector<double> fine = sp.to_fine(c);
  if (fine.sum() < 0.0) {
    c = -c;
    fine = -fine;
  }
  gs.coefficients = std::move(c);
  gs.fine = std::move(fine);
  gs.energy = e;
  gs.quartic = q;
  gs.eigenvalue = gs.coefficients.dot(sp.apply_a(gs.coefficients)) + kappa * q;
  return gs;
}

}  // namespace

QuarticTerm::QuarticTerm(const FeSpace& fe) : fe_(fe) {
  const int q = fe.degree();
  GaussRule rule = gauss_legendre(2 * q + 1);
  const int np = static_cast<int>(rule.x.size());
  const auto& basis = fe.basis();
  values_.resize(np * np, fe.local_size());
  weights_.resize(static_cast<std::size_t>(np) * np);
  for (int gy = 0; gy < np; ++gy)
    for (int gx = 0; gx < np; ++gx) {
      const int g = gy * np + gx;
      weights_[g] = rule.w[gx] * rule.w[gy];
      for (int b = 0; b <= q; ++b)
        for (int a = 0; a <= q; ++a)
          values_(g, b * (q + 1) + a) = basis.value(a, rule.x[gx]) * basis.value(b, rule.x[gy]);
    }
}

double QuarticTerm::integral(const Vector<double>& u) const {
  const double h = fe_.fine().h();
  const int nl = fe_.local_size();
  std::vector<int> dofs(nl);
  Vector<double> ul(nl);
  double sum = 0.0;
  for (int e = 0; e < fe_.fine().num_elements(); ++e) {
    fe_.element_dofs(e, dofs.data());
    for (int l = 0; l < nl; ++l) ul(l) = u(dofs[l]);
    Vector<double> uq = values_ * ul;
    double s = 0.0;
    for (Eigen::Index g = 0; g < uq.size(); ++g) {
      double v2 = uq(g) * uq(g);
      s += weights_[g] * v2 * v2;
    }
    sum += s;
  }
  return sum * h * h;
}

Vector<double> QuarticTerm::cubic_load(const Vector<double>& u) const {
  const double h = fe_.fine().h();
  const int nl = fe_.local_size();
  std::vector<int> dofs(nl);
  Vector<double> ul(nl);
  Vector<double> out = Vector<double>::Zero(fe_.num_dofs());
  for (int e = 0; e < fe_.fine().num_elements(); ++e) {
    fe_.element_dofs(e, dofs.data());
    for (int l = 0; l < nl; ++l) ul(l) = u(dofs[l]);
    Vector<double> uq = values_ * ul;
    for (Eigen::Index g = 0; g < uq.size(); ++g) uq(g) = weights_[g] * uq(g) * uq(g) * uq(g);
    Vector<double> contrib = values_.transpose() * uq;
    for (int l = 0; l < nl; ++l) out(dofs[l]) += contrib(l) * h * h;
  }
  return out;
}

double gpe_energy(const FeSpace& fe, const GpeProblem& prob, const Vector<double>& u) {
  validate(fe, prob);
  SparseMatrix<double> a = diffusion_reaction_form(fe, prob.potential).assemble();
  return 0.5 * u.dot(a * u) + 0.25 * prob.interaction * QuarticTerm(fe).integral(u);
}

Vector<double> gaussian_guess(const FeSpace& fe) {
  const Domain& d = fe.fine().domain();
  const double cx = d.x0 + 0.5 * d.side, cy = d.y0 + 0.5 * d.side;
  Vector<double> v = interpolate(fe, [&](double x, double y) {
    return std::exp(-0.5 * ((x - cx) * (x - cx) + (y - cy) * (y - cy)));
  });
  for (int k = 0; k < fe.num_dofs(); ++k)
    if (fe.on_boundary(k)) v(k) = 0.0;
  return v;
}

LodBasis<double> build_gpe_basis(const FeSpace& fe, const GpeProblem& prob, const ConstraintSpace& space, int ell,
                                 int threads) {
  validate(fe, prob);
  BilinearForm<double> form = diffusion_reaction_form(fe, prob.potential);
  QuasiInterpolator interp(space, fe);
  CorrectorBuilder<double> builder(fe, space, interp, form);
  return builder.assemble_basis(ell, threads);
}

GroundState ground_state(const FeSpace& fe, const GpeProblem& prob, const LodBasis<double>& basis,
                         const FlowParams& params, int threads) {
  validate(fe, prob);
  if (basis.size() == 0) throw std::invalid_argument("empty basis");
  if (basis.num_dofs() != fe.num_dofs()) throw std::invalid_argument("basis does not match the fine space");
  BilinearForm<double> form = diffusion_reaction_form(fe, prob.potential);
  BilinearForm<double> mform = mass_form(fe);
  auto a = std::make_shared<CoarseMatrix<double>>(galerkin_product(fe, form, basis.phi, basis.phi, threads));
  auto m = std::make_shared<CoarseMatrix<double>>(galerkin_product(fe, mform, basis.phi, basis.phi, threads));

  FlowSpace sp;
  sp.apply_a = [a](const Vector<double>& x) { return a->apply(x); };
  sp.apply_m = [m](const Vector<double>& x) { return m->apply(x); };
  if (a->is_dense) {
    auto llt = std::make_shared<Eigen::LLT<DenseMatrix<double>>>(a->dense);
    if (llt->info() != Eigen::Success) throw std::runtime_error("coarse energy matrix is not positive definite");
    sp.solve_a = [llt](const Vector<double>& x) { return Vector<double>(llt->solve(x)); };
  } else {
    auto f = std::make_shared<SpdFactorization>(a->sparse);
    sp.solve_a = [f](const Vector<double>& x) { return f->solve(x); };
  }
  const SparseMatrix<double>* phi = &basis.phi;
  sp.to_fine = [phi](const Vector<double>& c) { return Vector<double>(*phi * c); };
  sp.from_fine = [phi](const Vector<double>& v) { return Vector<double>(phi->transpose() * v); };

  // The basis coordinates are the quantities of interest.
  SparseMatrix<double> b = assemble_b(ConstraintSpace(fe.coarse(), basis.p, basis.mode), fe);
  Vector<double> c0 = b * gaussian_guess(fe);
  QuarticTerm quartic(fe);
  return run_flow(sp, quartic, prob.interaction, std::move(c0), params);
}

GroundState fine_ground_state(const FeSpace& fe, const GpeProblem& prob, FlowParams params) {
  validate(fe, prob);
  const auto& free = fe.free_dofs();
  const int n = fe.num_dofs();
  auto a = std::make_shared<SparseMatrix<double>>(
      submatrix(diffusion_reaction_form(fe, prob.potential).assemble(), free, free));
  auto m = std::make_shared<SparseMatrix<double>>(submatrix(assemble_mass(fe), free, free));
  auto f = std::make_shared<SpdFactorization>(*a);
  FlowSpace sp;
  sp.apply_a = [a](const Vector<double>& x) { return Vector<double>(*a * x); };
  sp.apply_m = [m](const Vector<double>& x) { return Vector<double>(*m * x); };
  sp.solve_a = [f](const Vector<double>& x) { return f->solve(x); };
  sp.to_fine = [&free, n](const Vector<double>& c) { return scatter<double>(c, free, n); };
  sp.from_fine = [&free](const Vector<double>& v) { return gather<double>(v, free); };
  QuarticTerm quartic(fe);
  return run_flow(sp, quartic, prob.interaction, gather<double>(gaussian_guess(fe), free), params);
}

GpeErrors gpe_errors(const NormEvaluator& norms, const GroundState& gs, const GroundState& reference) {
  if (gs.fine.size() != reference.fine.size()) throw std::invalid_argument("ground states live on different spaces");
  Vector<double> u = gs.fine.sum() < 0.0 ? Vector<double>(-gs.fine) : gs.fine;
  Vector<double> r = reference.fine.sum() < 0.0 ? Vector<double>(-reference.fine) : reference.fine;
  Vector<double> d = u - r;
  GpeErrors out;
  out.h1 = std::sqrt(std::max(0.0, d.dot(norms.laplace() * d)));
  out.l2 = std::sqrt(std::max(0.0, d.dot(norms.mass() * d)));
  out.energy = std::abs(gs.energy - reference.energy);
  out.eigenvalue = std::abs(gs.eigenvalue - reference.eigenvalue);
  return out;
}

}  // namespace lod
