#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "lod/problems.hpp"

using namespace lod;

TEST(Checkerboard, BoundsAndDeterminism) {
  CoefficientField a = coefficient_a1(64, 3);
  EXPECT_GE(a.min(), 0.1);
  EXPECT_LE(a.max(), 2.0);
  EXPECT_EQ(a, coefficient_a1(64, 3));
  CoefficientField b = coefficient_a2(64, 3);
  EXPECT_GE(b.min(), 0.1);
  EXPECT_LE(b.max(), 1.0);
  EXPECT_EQ(b, coefficient_a2(64, 3));
  EXPECT_THROW(coefficient_a1(3, 0), std::invalid_argument);
}

TEST(Checkerboard, SeedChangesMostCells) {
  CoefficientField a = coefficient_a2(64, 1), b = coefficient_a2(64, 2);
  int changed = 0;
  for (std::size_t k = 0; k < a.values.size(); ++k) changed += a.values[k] != b.values[k];
  EXPECT_GE(changed, static_cast<int>(0.9 * a.values.size()));
}

TEST(Checkerboard, CellValuesDoNotDependOnGridSize) {
  CoefficientField small = coefficient_a2(16, 5), large = coefficient_a2(64, 5);
  for (int j = 0; j < 16; ++j)
    for (int i = 0; i < 16; ++i) EXPECT_EQ(small.at(i, j), large.at(i, j));
}

TEST(Checkerboard, MeanOfUniformValues) {
  CoefficientField a = coefficient_a2(64, 11);
  double mean = std::accumulate(a.values.begin(), a.values.end(), 0.0) / a.values.size();
  EXPECT_NEAR(mean, 0.55, 0.02);
}

TEST(CoefficientA1, InclusionFollowsParabola) {
  const int m = 64;
  CoefficientField a = coefficient_a1(m, 4);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      double d = parabola_distance((i + 0.5) / m, (j + 0.5) / m);
      if (d <= 4.0 / m) {
        EXPECT_EQ(a.at(i, j), 2.0);
      } else {
        EXPECT_LE(a.at(i, j), 1.0);
      }
    }
  // (1/2, 0) is the vertex of the parabola
  EXPECT_EQ(a.at(m / 2, 0), 2.0);
  EXPECT_LE(a.at(m / 2, m - 1), 1.0);
}

TEST(ParabolaDistance, Values) {
  EXPECT_NEAR(parabola_distance(0.5, 0.0), 0.0, 1e-12);
  EXPECT_NEAR(parabola_distance(0.25, 0.25), 0.0, 1e-12);
  EXPECT_NEAR(parabola_distance(0.5, -1.0), 1.0, 1e-12);
  // nearest point of y = 4 (x - 1/2)^2 to (1/2, 1) by brute force
  double best = 1e300;
  for (int k = 0; k <= 200000; ++k) {
    double t = -0.5 + 2.0 * k / 200000;
    double py = (2 * t - 1) * (2 * t - 1);
    best = std::min(best, std::hypot(0.5 - t, 1.0 - py));
  }
  EXPECT_NEAR(parabola_distance(0.5, 1.0), best, 1e-8);
}

TEST(Tent, Values) {
  EXPECT_EQ(tent(0.0), 0.0);
  EXPECT_EQ(tent(0.5), 1.0);
  EXPECT_EQ(tent(-3.5), 1.0);
  EXPECT_DOUBLE_EQ(tent(0.25), 0.5);
  EXPECT_DOUBLE_EQ(tent(2.75), 0.5);
}

TEST(GpePotential, Values) {
  CoefficientField v = gpe_potential(12);
  EXPECT_EQ(v.domain, Domain::centered(6.0));
  EXPECT_GE(v.min(), 0.0);
  // cell (6, 6) has midpoint (0.5, 0.5)
  EXPECT_DOUBLE_EQ(v.at(6, 6), 0.25 + 40.0);
  CoefficientField flat = gpe_potential(12, 0.0);
  EXPECT_DOUBLE_EQ(flat.at(0, 0), 0.5 * (5.5 * 5.5 * 2));
}

TEST(Sources, Values) {
  EXPECT_EQ(source("f2")(0.3, 0.7), 1.0);
  EXPECT_NEAR(source("f1")(0.5, 0.5), 2 * M_PI * M_PI, 1e-12);
  EXPECT_NEAR(source("f3")(0.125, 0.125), 1e4 / std::exp(1.0), 1e-9);
  EXPECT_EQ(source("f3")(0.125 + 0.05, 0.125), 0.0);
  EXPECT_EQ(source("f3")(0.5, 0.5), 0.0);
  EXPECT_GT(source("f3")(0.125 + 0.049, 0.125), 0.0);
  EXPECT_THROW(source("f4"), std::invalid_argument);
}

TEST(CoefficientGrid, RoundTrip) {
  auto path = (std::filesystem::temp_directory_path() / "lod_grid_test.txt").string();
  CoefficientField a = coefficient_a1(16, 9, Domain::centered(2.0));
  write_coefficient_grid(path, a);
  EXPECT_EQ(read_coefficient_grid(path), a);
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("m 2\ndomain 0 0 1\n1 2 3\n", f);
    std::fclose(f);
  }
  EXPECT_THROW(read_coefficient_grid(path), std::runtime_error);
  EXPECT_THROW(read_coefficient_grid(path + ".missing"), std::runtime_error);
}
