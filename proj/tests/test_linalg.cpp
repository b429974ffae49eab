#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "lod/errors.hpp"
#include "lod/linalg.hpp"
#include "support.hpp"

using namespace lod;

namespace {

SparseMatrix<double> laplace_1d(int n, double h) {
  std::vector<Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0 / h);
    if (i > 0) t.emplace_back(i, i - 1, -1.0 / h);
    if (i + 1 < n) t.emplace_back(i, i + 1, -1.0 / h);
  }
  return assemble<double>(n, n, t);
}

SparseMatrix<double> random_sparse(int rows, int cols, double density, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1), p(0, 1);
  std::vector<Triplet<double>> t;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (p(rng) < density) t.emplace_back(i, j, u(rng));
  return assemble<double>(rows, cols, t);
}

}  // namespace

TEST(Assemble, SumsDuplicates) {
  SparseMatrix<double> m = assemble<double>(1, 1, {{0, 0, 1.0}, {0, 0, 2.0}});
  EXPECT_EQ(m.nonZeros(), 1);
  EXPECT_DOUBLE_EQ(m.coeff(0, 0), 3.0);
  EXPECT_EQ(assemble<double>(3, 3, {}).nonZeros(), 0);
}

TEST(Assemble, LaplaceStencil) {
  std::vector<Triplet<double>> t;
  for (int e = 0; e < 4; ++e) {
    int a = e - 1, b = e;  // element between nodes e-1 and e, boundary nodes dropped
    for (int r : {a, b})
      for (int c : {a, b})
        if (r >= 0 && r < 3 && c >= 0 && c < 3) t.emplace_back(r, c, r == c ? 1.0 : -1.0);
  }
  DenseMatrix<double> m(assemble<double>(3, 3, t));
  DenseMatrix<double> expect(3, 3);
  expect << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  EXPECT_EQ(m, expect);
}

TEST(Assemble, OrderIndependentBitwise) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> idx(0, 9);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Triplet<double>> t;
  for (int k = 0; k < 500; ++k) t.emplace_back(idx(rng), idx(rng), u(rng));
  SparseMatrix<double> a = assemble<double>(10, 10, t);
  std::shuffle(t.begin(), t.end(), rng);
  SparseMatrix<double> b = assemble<double>(10, 10, t);
  ASSERT_EQ(a.nonZeros(), b.nonZeros());
  for (int k = 0; k < a.nonZeros(); ++k) {
    EXPECT_EQ(a.valuePtr()[k], b.valuePtr()[k]);
    EXPECT_EQ(a.innerIndexPtr()[k], b.innerIndexPtr()[k]);
  }
}

TEST(Assemble, RejectsOutOfRange) {
  EXPECT_THROW(assemble<double>(2, 2, {{2, 0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(assemble<double>(2, 2, {{0, -1, 1.0}}), std::invalid_argument);
}

TEST(SolveSpd, Examples) {
  SparseMatrix<double> id(2, 2);
  id.setIdentity();
  EXPECT_EQ(solve_spd(id, Vector<double>::Unit(2, 0)), Vector<double>::Unit(2, 0));
  SparseMatrix<double> d = assemble<double>(2, 2, {{0, 0, 2.0}, {1, 1, 4.0}});
  Vector<double> rhs(2);
  rhs << 2, 4;
  Vector<double> x = solve_spd(d, rhs);
  EXPECT_NEAR(x(0), 1.0, 1e-15);
  EXPECT_NEAR(x(1), 1.0, 1e-15);
}

TEST(SolveSpd, DiscreteParabola) {
  // -u'' = 1 on (0,1) with P1 elements is nodally exact: u = x(1-x)/2.
  const int n = 3;
  const double h = 0.25;
  Vector<double> rhs = Vector<double>::Constant(n, h);
  Vector<double> u = solve_spd(laplace_1d(n, h), rhs);
  for (int i = 0; i < n; ++i) {
    double x = (i + 1) * h;
    EXPECT_NEAR(u(i), 0.5 * x * (1 - x), 1e-14);
  }
}

TEST(SolveSpd, RejectsIndefinite) {
  SparseMatrix<double> m = assemble<double>(2, 2, {{0, 0, 1.0}, {1, 1, -1.0}});
  EXPECT_THROW(solve_spd(m, Vector<double>::Ones(2)), NumericalBreakdown);
}

TEST(SolveSpd, Residual) {
  std::mt19937_64 rng(5);
  SparseMatrix<double> r = random_sparse(40, 40, 0.1, rng);
  SparseMatrix<double> id(40, 40);
  id.setIdentity();
  SparseMatrix<double> m = SparseMatrix<double>(r.transpose()) * r + id;
  Vector<double> b = test::random_vector(40, rng);
  Vector<double> x = solve_spd(m, b);
  EXPECT_LE((m * x - b).norm() / b.norm(), 1e-10);
}

TEST(Kkt, HandExample) {
  KktSystem sys;
  sys.a = assemble<double>(2, 2, {{0, 0, 1.0}, {1, 1, 1.0}});
  sys.b = assemble<double>(1, 2, {{0, 0, 1.0}});
  sys.f = Vector<double>::Zero(2);
  sys.g = Vector<double>::Ones(1);
  auto [x, lambda] = solve_kkt(sys);
  EXPECT_NEAR(x(0), 1.0, 1e-14);
  EXPECT_NEAR(x(1), 0.0, 1e-14);
  EXPECT_NEAR(lambda(0), -1.0, 1e-14);
}

TEST(Kkt, NoConstraintsIsSpdSolve) {
  KktSystem sys;
  sys.a = laplace_1d(5, 0.2);
  sys.b = SparseMatrix<double>(0, 5);
  sys.f = Vector<double>::Ones(5);
  sys.g = Vector<double>(0);
  auto [x, lambda] = solve_kkt(sys);
  EXPECT_EQ(lambda.size(), 0);
  EXPECT_LE((x - solve_spd(sys.a, sys.f)).norm(), 1e-13);
}

TEST(Kkt, ResidualAndReuse) {
  std::mt19937_64 rng(7);
  const int n = 60, m = 12;
  SparseMatrix<double> a = laplace_1d(n, 1.0 / (n + 1));
  SparseMatrix<double> b = random_sparse(m, n, 0.2, rng);
  Vector<double> f1 = test::random_vector(n, rng), g1 = test::random_vector(m, rng);
  Vector<double> f2 = test::random_vector(n, rng), g2 = test::random_vector(m, rng);
  KktFactorization<double> kkt(a, b);
  auto [x1, l1] = kkt.solve(f1, g1);
  auto [x2, l2] = kkt.solve(f2, g2);
  auto [rp, rc] = kkt_residual<double>(a, b, f1, g1, x1, l1);
  EXPECT_LE(rp, 1e-9);
  EXPECT_LE(rc, 1e-9);
  EXPECT_LE((b * x1 - g1).norm() / g1.norm(), 1e-9);
  KktFactorization<double> fresh(a, b);
  auto [y2, k2] = fresh.solve(f2, g2);
  EXPECT_LE((x2 - y2).norm(), 1e-12 * x2.norm());
  EXPECT_LE((l2 - k2).norm(), 1e-12 * l2.norm());
}

TEST(Kkt, Deterministic) {
  std::mt19937_64 rng(8);
  SparseMatrix<double> a = laplace_1d(30, 0.1);
  SparseMatrix<double> b = random_sparse(5, 30, 0.3, rng);
  Vector<double> f = test::random_vector(30, rng), g = test::random_vector(5, rng);
  auto r1 = KktFactorization<double>(a, b).solve(f, g);
  auto r2 = KktFactorization<double>(a, b).solve(f, g);
  EXPECT_EQ(r1.first, r2.first);
  EXPECT_EQ(r1.second, r2.second);
}

TEST(Kkt, ComplexSystem) {
  std::mt19937_64 rng(9);
  const int n = 20, m = 4;
  SparseMatrix<Complex> a = laplace_1d(n, 0.05).cast<Complex>();
  for (int i = 0; i < n; ++i) a.coeffRef(i, i) += Complex(-3.0, 0.5);
  SparseMatrix<Complex> b = random_sparse(m, n, 0.4, rng).cast<Complex>();
  Vector<Complex> f = test::random_vector(n, rng).cast<Complex>() * Complex(0.3, 1.0);
  Vector<Complex> g = test::random_vector(m, rng).cast<Complex>();
  KktFactorization<Complex> kkt(a, b);
  auto [x, l] = kkt.solve(f, g);
  auto [rp, rc] = kkt_residual<Complex>(a, b, f, g, x, l);
  EXPECT_LE(rp, 1e-9);
  EXPECT_LE(rc, 1e-9);
}

TEST(Kkt, RankDeficientConstraints) {
  SparseMatrix<double> a = laplace_1d(4, 0.2);
  SparseMatrix<double> b = assemble<double>(2, 4, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 2.0}, {1, 1, 2.0}});
  EXPECT_EQ(constraint_rank_deficiency(b), 1);
  try {
    check_constraint_rank(b);
    FAIL() << "expected ConstraintRankError";
  } catch (const ConstraintRankError& e) {
    EXPECT_EQ(e.deficient_rows(), 1);
  }
  SparseMatrix<double> wide(5, 4);
  EXPECT_THROW(KktFactorization<double>(a, wide), ConstraintRankError);
}

TEST(SymmetryDefect, Values) {
  SparseMatrix<double> s = laplace_1d(4, 1.0);
  EXPECT_EQ(symmetry_defect(s), 0.0);
  SparseMatrix<double> ns = assemble<double>(2, 2, {{0, 1, 1.0}});
  EXPECT_DOUBLE_EQ(symmetry_defect(ns), 1.0);
}

TEST(DenseSolves, SpdAndGeneral) {
  DenseMatrix<double> m(2, 2);
  m << 4, 1, 1, 3;
  Vector<double> x = solve_dense_spd(m, Vector<double>::Ones(2));
  EXPECT_LE((m * x - Vector<double>::Ones(2)).norm(), 1e-14);
  DenseMatrix<double> bad(2, 2);
  bad << 1, 2, 2, 1;
  EXPECT_THROW(solve_dense_spd(bad, Vector<double>::Ones(2)), NumericalBreakdown);
  DenseMatrix<Complex> c(2, 2);
  c << Complex(1, 1), 2, 0, Complex(0, -1);
  Vector<Complex> y = solve_dense_general(c, Vector<Complex>::Ones(2));
  EXPECT_LE((c * y - Vector<Complex>::Ones(2)).norm(), 1e-14);
  DenseMatrix<Complex> sing = DenseMatrix<Complex>::Ones(2, 2);
  EXPECT_THROW(solve_dense_general(sing, Vector<Complex>::Ones(2)), SingularSystemError);
}
