#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lod/errors.hpp"
#include "lod/fem.hpp"
#include "lod/problems.hpp"
#include "support.hpp"

using namespace lod;
using std::numbers::pi;

namespace {

FeSpace single_element(int q = 1, BoundaryCondition bc = BoundaryCondition::none) {
  return test::make_space(1, 1, q, bc);
}

double sum_entries(const SparseMatrix<double>& m) {
  double s = 0;
  for (int k = 0; k < m.nonZeros(); ++k) s += m.valuePtr()[k];
  return s;
}

}  // namespace

TEST(Stiffness, UnitElement) {
  FeSpace fe = single_element();
  DenseMatrix<double> k(assemble_stiffness(fe, CoefficientField::constant(Domain::unit_square(), 1.0)));
  // local order (ll, lr, ul, ur)
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(k(i, i), 2.0 / 3, 1e-15);
  EXPECT_NEAR(k(0, 3), -1.0 / 3, 1e-15);
  EXPECT_NEAR(k(1, 2), -1.0 / 3, 1e-15);
  EXPECT_NEAR(k(0, 1), -1.0 / 6, 1e-15);
  EXPECT_NEAR(k(0, 2), -1.0 / 6, 1e-15);
}

TEST(Mass, UnitElement) {
  FeSpace fe = single_element();
  DenseMatrix<double> m(assemble_mass(fe));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(m(i, i), 1.0 / 9, 1e-15);
  EXPECT_NEAR(m(0, 1), 1.0 / 18, 1e-15);
  EXPECT_NEAR(m(0, 2), 1.0 / 18, 1e-15);
  EXPECT_NEAR(m(0, 3), 1.0 / 36, 1e-15);
}

TEST(Stiffness, LinearInCoefficient) {
  FeSpace fe = test::make_space(2, 4, 2);
  CoefficientField a = coefficient_a2(4, 3);
  CoefficientField a2 = a;
  for (double& v : a2.values) v *= 2;
  SparseMatrix<double> d = assemble_stiffness(fe, a2) - 2.0 * assemble_stiffness(fe, a);
  EXPECT_LE(DenseMatrix<double>(d).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Stiffness, ConstantsInKernelAndSymmetric) {
  for (int q = 1; q <= 3; ++q) {
    FeSpace fe = test::make_space(2, 4, q, BoundaryCondition::none);
    SparseMatrix<double> k = assemble_stiffness(fe, coefficient_a2(8, 1));
    EXPECT_LE(test::max_abs(k * Vector<double>::Ones(fe.num_dofs())), 1e-12);
    EXPECT_LE(symmetry_defect(k), 1e-14);
    SparseMatrix<double> m = assemble_mass(fe, coefficient_a2(8, 2));
    EXPECT_LE(symmetry_defect(m), 1e-14);
  }
}

TEST(Mass, EntrySumIsIntegral) {
  for (int q = 1; q <= 3; ++q) {
    FeSpace fe = test::make_space(2, 3, q, BoundaryCondition::none);
    EXPECT_NEAR(sum_entries(assemble_mass(fe)), 1.0, 1e-13);
    EXPECT_NEAR(sum_entries(assemble_mass(fe, 2.0)), 2.0, 1e-13);
    CoefficientField w = coefficient_a2(6, 4);
    double integral = 0;
    for (double v : w.values) integral += v / 36.0;
    EXPECT_NEAR(sum_entries(assemble_mass(fe, w)), integral, 1e-13);
  }
}

TEST(Mass, BoundaryMassTotal) {
  FeSpace fe = test::make_space(2, 4, 2, BoundaryCondition::robin);
  EXPECT_NEAR(sum_entries(assemble_boundary_mass(fe)), 4.0, 1e-13);
}

TEST(Stiffness, CoefficientBounds) {
  FeSpace fe = test::make_space(4, 4);
  CoefficientField a = coefficient_a1(16, 5);
  SparseMatrix<double> k = assemble_stiffness(fe, a);
  SparseMatrix<double> k1 = assemble_stiffness(fe, CoefficientField::constant(Domain::unit_square(), 1.0));
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    Vector<double> v = test::random_fine(fe, rng);
    double e = v.dot(k * v), g = v.dot(k1 * v);
    EXPECT_GE(e, a.min() * g * (1 - 1e-12));
    EXPECT_LE(e, a.max() * g * (1 + 1e-12));
  }
}

TEST(Alignment, RejectsMisalignedGrid) {
  FeSpace fe = test::make_space(2, 4);  // 8 fine cells
  EXPECT_THROW(assemble_stiffness(fe, coefficient_a2(3, 0)), AlignmentError);
  EXPECT_THROW(assemble_stiffness(fe, coefficient_a2(16, 0)), AlignmentError);
  EXPECT_THROW(assemble_stiffness(fe, CoefficientField::constant(Domain::centered(1.0), 1.0)), AlignmentError);
  EXPECT_NO_THROW(assemble_stiffness(fe, coefficient_a2(4, 0)));
}

TEST(Space, DofLayout) {
  FeSpace fe = test::make_space(2, 2, 2);
  EXPECT_EQ(fe.side(), 9);
  EXPECT_EQ(fe.num_dofs(), 81);
  EXPECT_EQ(fe.free_dofs().size(), 49u);
  auto d = fe.element_dofs(fe.fine().element_id(1, 0));
  EXPECT_EQ(d[0], fe.dof(2, 0));
  EXPECT_EQ(d[8], fe.dof(4, 2));
  auto c = fe.dof_coords(fe.dof(3, 5));
  EXPECT_DOUBLE_EQ(c[0], 3.0 / 8);
  EXPECT_DOUBLE_EQ(c[1], 5.0 / 8);
  EXPECT_THROW(FeSpace(refine(build_mesh(Domain::unit_square(), 1), 1), 0), std::invalid_argument);
}

TEST(Reference, SmoothPoissonSolution) {
  FeSpace fe = test::make_space(1, 64);
  CoefficientField a = CoefficientField::constant(Domain::unit_square(), 1.0);
  Vector<double> u = solve_reference(fe, a, source("f1"));
  double err = 0;
  for (int k = 0; k < fe.num_dofs(); ++k) {
    auto x = fe.dof_coords(k);
    err = std::max(err, std::abs(u(k) - std::sin(pi * x[0]) * std::sin(pi * x[1])));
  }
  EXPECT_LE(err, 5e-3);
}

TEST(Reference, ZeroSource) {
  FeSpace fe = test::make_space(2, 4);
  Vector<double> u = solve_reference(fe, coefficient_a2(8, 0), [](double, double) { return 0.0; });
  EXPECT_EQ(test::max_abs(u), 0.0);
  FeSpace robin = test::make_space(2, 4, 1, BoundaryCondition::robin);
  EXPECT_THROW(solve_reference(robin, coefficient_a2(8, 0), source("f2")), std::invalid_argument);
}

TEST(Reference, EnergyErrorHalvesWithH) {
  CoefficientField a = CoefficientField::constant(Domain::unit_square(), 1.0);
  auto exact = [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); };
  std::vector<double> err;
  for (int n : {8, 16, 32, 64}) {
    // compare against the q=3 interpolant of the exact solution on the same mesh
    FeSpace fe = test::make_space(1, n, 1);
    FeSpace fine = test::make_space(1, n, 3);
    Vector<double> u = solve_reference(fe, a, source("f1"));
    // embed the Q1 solution into the Q3 space
    Vector<double> uf(fine.num_dofs());
    for (int k = 0; k < fine.num_dofs(); ++k) {
      auto [gx, gy] = fine.dof_xy(k);
      int ix = std::min(gx / 3, n - 1), iy = std::min(gy / 3, n - 1);
      double s = gx / 3.0 - ix, t = gy / 3.0 - iy;
      auto val = [&](int i, int j) { return u(fe.dof(i, j)); };
      uf(k) = (1 - s) * (1 - t) * val(ix, iy) + s * (1 - t) * val(ix + 1, iy) + (1 - s) * t * val(ix, iy + 1) +
              s * t * val(ix + 1, iy + 1);
    }
    Vector<double> d = uf - interpolate(fine, exact);
    err.push_back(norms(fine, d, a).energy);
  }
  for (std::size_t i = 1; i < err.size(); ++i) EXPECT_NEAR(err[i - 1] / err[i], 2.0, 0.15);
}

TEST(Reference, GalerkinOrthogonality) {
  FeSpace fe = test::make_space(4, 4, 2);
  CoefficientField a = coefficient_a1(16, 2);
  std::mt19937_64 rng(4);
  Vector<double> c = test::random_vector(9, rng);
  auto f = [&](double x, double y) {
    double s = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += c(3 * i + j) * std::cos(pi * i * x) * std::cos(pi * j * y);
    return s;
  };
  Vector<double> u = solve_reference(fe, a, f);
  Vector<double> load = assemble_mass(fe) * interpolate(fe, f);
  Vector<double> r = assemble_stiffness(fe, a) * u - load;
  Vector<double> rf = gather(r, fe.free_dofs());
  EXPECT_LE(rf.norm() / gather(load, fe.free_dofs()).norm(), 1e-10);
}

TEST(Norms, Values) {
  FeSpace fe = test::make_space(1, 64, 2);
  CoefficientField one = CoefficientField::constant(Domain::unit_square(), 1.0);
  Norms z = norms(fe, Vector<double>::Zero(fe.num_dofs()), one);
  EXPECT_EQ(z.l2, 0.0);
  EXPECT_EQ(z.energy, 0.0);
  EXPECT_EQ(z.h1, 0.0);
  Vector<double> u = interpolate(fe, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });
  Norms n = norms(fe, u, one);
  EXPECT_NEAR(n.energy * n.energy, pi * pi / 2, 1e-5);
  EXPECT_NEAR(n.l2 * n.l2, 0.25, 1e-6);
  Norms s = norms(fe, Vector<double>(-3.0 * u), one);
  EXPECT_NEAR(s.energy, 3 * n.energy, 1e-12);
  EXPECT_NEAR(s.l2, 3 * n.l2, 1e-12);
  EXPECT_NEAR(s.h1, 3 * n.h1, 1e-12);
}

TEST(GatherScatter, RoundTrip) {
  Vector<double> v = Vector<double>::LinSpaced(6, 0, 5);
  std::vector<int> idx{1, 4, 5};
  Vector<double> g = gather(v, idx);
  EXPECT_EQ(g(1), 4.0);
  Vector<double> s = scatter(g, idx, 6);
  EXPECT_EQ(s(0), 0.0);
  EXPECT_EQ(s(5), 5.0);
  SparseMatrix<double> m = assemble<double>(3, 3, {{0, 0, 1.0}, {2, 2, 3.0}, {0, 2, 5.0}});
  SparseMatrix<double> sub = submatrix(m, {0, 2}, {2});
  EXPECT_EQ(sub.coeff(0, 0), 5.0);
  EXPECT_EQ(sub.coeff(1, 0), 3.0);
}
