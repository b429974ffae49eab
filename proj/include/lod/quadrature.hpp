#pragma once

#include <vector>

namespace lod {

/// Gauss-Legendre rule mapped to [0, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
  int size() const { return static_cast<int>(x.size()); }
};

GaussRule gauss_legendre(int n);

/// Legendre polynomial P_k on [-1, 1].
double legendre(int k, double t);

/// sqrt(2k+1) P_k(2s-1): orthonormal in L^2(0, 1).
double scaled_legendre(int k, double s);

/// Lagrange basis on q+1 equispaced nodes of [0, 1].
class LagrangeBasis1D {
 public:
  explicit LagrangeBasis1D(int q);
  int degree() const { return q_; }
  double node(int a) const { return nodes_[a]; }
  double value(int a, double s) const;
  double derivative(int a, double s) const;

 private:
  int q_;
  std::vector<double> nodes_;
  std::vector<double> denom_;
};

}  // namespace lod
