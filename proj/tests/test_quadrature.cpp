#include <gtest/gtest.h>

#include <cmath>

#include "lod/quadrature.hpp"

using namespace lod;

TEST(Gauss, IntegratesPolynomialsExactly) {
  for (int n = 1; n <= 8; ++n) {
    GaussRule r = gauss_legendre(n);
    ASSERT_EQ(r.size(), n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += r.w[i] * std::pow(r.x[i], k);
      EXPECT_NEAR(s, 1.0 / (k + 1), 1e-14) << "n=" << n << " k=" << k;
    }
  }
}

TEST(Legendre, Orthonormal) {
  GaussRule r = gauss_legendre(8);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) {
      double s = 0;
      for (int i = 0; i < r.size(); ++i) s += r.w[i] * scaled_legendre(a, r.x[i]) * scaled_legendre(b, r.x[i]);
      EXPECT_NEAR(s, a == b ? 1.0 : 0.0, 1e-13);
    }
  EXPECT_DOUBLE_EQ(legendre(2, 0.5), -0.125);
  EXPECT_DOUBLE_EQ(legendre(3, 1.0), 1.0);
}

TEST(Lagrange, NodalAndPartitionOfUnity) {
  for (int q = 1; q <= 4; ++q) {
    LagrangeBasis1D b(q);
    for (int a = 0; a <= q; ++a)
      for (int c = 0; c <= q; ++c) EXPECT_NEAR(b.value(a, b.node(c)), a == c ? 1.0 : 0.0, 1e-14);
    for (double s : {0.1, 0.37, 0.9}) {
      double sum = 0, dsum = 0;
      for (int a = 0; a <= q; ++a) {
        sum += b.value(a, s);
        dsum += b.derivative(a, s);
      }
      EXPECT_NEAR(sum, 1.0, 1e-13);
      EXPECT_NEAR(dsum, 0.0, 1e-12);
    }
  }
}

TEST(Lagrange, DerivativeMatchesFiniteDifference) {
  LagrangeBasis1D b(3);
  const double s = 0.41, d = 1e-6;
  for (int a = 0; a <= 3; ++a)
    EXPECT_NEAR(b.derivative(a, s), (b.value(a, s + d) - b.value(a, s - d)) / (2 * d), 1e-7);
}
