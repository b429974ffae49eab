#include "lod/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace lod {

namespace {

// P_n(t) and P_n'(t).
std::pair<double, double> legendre_and_derivative(int n, double t) {
  double p0 = 1.0, p1 = t;
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (t * p1 - p0) / (t * t - 1.0)};
}

}  // namespace

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("Gauss rule needs at least one point");
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = legendre_and_derivative(n, t);
      double dt = p / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    double dp = legendre_and_derivative(n, t).second;
    double w = 1.0 / ((1.0 - t * t) * dp * dp);
    rule.x[i] = 0.5 * (1.0 - t);
    rule.x[n - 1 - i] = 0.5 * (1.0 + t);
    rule.w[i] = rule.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.x[n / 2] = 0.5;
  return rule;
}

double legendre(int k, double t) {
  if (k == 0) return 1.0;
  double p0 = 1.0, p1 = t;
  for (int j = 2; j <= k; ++j) {
    double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double scaled_legendre(int k, double s) { return std::sqrt(2.0 * k + 1.0) * legendre(k, 2.0 * s - 1.0); }

LagrangeBasis1D::LagrangeBasis1D(int q) : q_(q), nodes_(q + 1), denom_(q + 1) {
  if (q < 1) throw std::invalid_argument("Lagrange degree must be positive");
  for (int a = 0; a <= q; ++a) nodes_[a] = static_cast<double>(a) / q;
  for (int a = 0; a <= q; ++a) {
    double d = 1.0;
    for (int b = 0; b <= q; ++b)
      if (b != a) d *= nodes_[a] - nodes_[b];
    denom_[a] = d;
  }
}

double LagrangeBasis1D::value(int a, double s) const {
  double v = 1.0;
  for (int b = 0; b <= q_; ++b)
    if (b != a) v *= s - nodes_[b];
  return v / denom_[a];
}

double LagrangeBasis1D::derivative(int a, double s) const {
  double sum = 0.0;
  for (int c = 0; c <= q_; ++c) {
    if (c == a) continue;
    double v = 1.0;
    for (int b = 0; b <= q_; ++b)
      if (b != a && b != c) v *= s - nodes_[b];
    sum += v;
  }
  return sum / denom_[a];
}

}  // namespace lod
