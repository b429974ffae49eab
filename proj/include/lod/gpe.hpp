#pragma once

#include <vector>

#include "lod/corrector.hpp"
#include "lod/fem.hpp"
#include "lod/lodsolve.hpp"

namespace lod {

/// E(v) = 1/2 (grad v, grad v) + 1/2 (V v, v) + (interaction/4) (|v|^2 v, v)
/// over H^1_0 of the potential's domain.
struct GpeProblem {
  CoefficientField potential;
  double interaction = 0.0;
};

/// Quartic term on the fine space, integrated with 2q+1 Gauss points per
/// direction (exact for piecewise polynomial u).
class QuarticTerm {
 public:
  explicit QuarticTerm(const FeSpace& fe);
  /// int u^4
  double integral(const Vector<double>& u) const;
  /// (u^3, phi_k) for all fine dofs.
  Vector<double> cubic_load(const Vector<double>& u) const;

 private:
  const FeSpace& fe_;
  DenseMatrix<double> values_;  // quadrature points x local dofs
  std::vector<double> weights_;
};

/// Energy of a fine function, everything assembled on the fine mesh.
double gpe_energy(const FeSpace& fe, const GpeProblem& prob, const Vector<double>& u);

struct FlowParams {
  double tol = 1e-12;
  int max_iter = 5000;
  double step = 1.0;
  int max_halvings = 60;
};

struct GroundState {
  Vector<double> coefficients;
  Vector<double> fine;
  double energy = 0.0;
  double eigenvalue = 0.0;
  double quartic = 0.0;  // int u^4
  std::vector<double> energy_log;
  int iterations = 0;
  bool converged = false;
  double last_delta = 0.0;
};

/// Fine function of exp(-|x - c|^2 / 2), c the domain centre.
Vector<double> gaussian_guess(const FeSpace& fe);

/// Minimizes the energy over span(basis) subject to ||u||_{L^2} = 1 by a
/// projected gradient flow in the a-metric, a(w, v) = (grad w, grad v) + (V w, v),
/// with step halving until the energy decreases. The result is normalized to a
/// non-negative mean. Prints a warning when max_iter is reached first.
GroundState ground_state(const FeSpace& fe, const GpeProblem& prob, const LodBasis<double>& basis,
                         const FlowParams& params = {}, int threads = 1);

/// The same flow over all free fine dofs.
GroundState fine_ground_state(const FeSpace& fe, const GpeProblem& prob, FlowParams params = {.tol = 1e-13});

/// Builds the LOD basis of the linear part of the energy.
LodBasis<double> build_gpe_basis(const FeSpace& fe, const GpeProblem& prob, const ConstraintSpace& space, int ell,
                                 int threads = 1);

struct GpeErrors {
  double h1 = 0.0;  // |grad (u - u_ref)|
  double l2 = 0.0;
  double energy = 0.0;
  double eigenvalue = 0.0;
};

GpeErrors gpe_errors(const NormEvaluator& norms, const GroundState& gs, const GroundState& reference);

}  // namespace lod
