#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "lod/fem.hpp"

namespace lod {

std::uint64_t splitmix64(std::uint64_t x);

/// Uniform sample in [0, 1) determined by (seed, i, j) alone.
double keyed_uniform(std::uint64_t seed, std::int64_t i, std::int64_t j);

/// Cells with i.i.d. values uniform on [lo, hi].
CoefficientField random_checkerboard(Domain domain, int m, std::uint64_t seed, double lo = 0.1, double hi = 1.0);

/// Distance from (x, y) to the parabola y = (2x - 1)^2 in unit-square
/// coordinates.
double parabola_distance(double x, double y);

/// Random checkerboard on [0.1, 1] with value 2 on every cell whose midpoint
/// lies within 4 cell widths of the parabola y = (2x - 1)^2. Requires m >= 4.
CoefficientField coefficient_a1(int m, std::uint64_t seed, Domain domain = Domain::unit_square());

/// Random checkerboard on [0.1, 1] without inclusion.
CoefficientField coefficient_a2(int m = 64, std::uint64_t seed = 0, Domain domain = Domain::unit_square());

/// 1-periodic tent, 0 at integers and 1 at half-integers.
double tent(double t);

/// 0.5 |x|^2 + amplitude tent(x) tent(y) sampled at the cell midpoints of an
/// m x m grid on the given domain.
CoefficientField gpe_potential(int m, double amplitude = 40.0, Domain domain = Domain::centered(6.0));

/// f1 = 2 pi^2 sin(pi x) sin(pi y), f2 = 1, f3 = bump of height 1e4/e and
/// radius 1/20 centred at (1/8, 1/8). Throws std::invalid_argument otherwise.
ScalarFunction source(std::string_view name);

/// Plain-text grid file: "m <m>", "domain <x0> <y0> <side>", then m rows of
/// m values, row j holding cells (0..m-1, j).
void write_coefficient_grid(const std::string& path, const CoefficientField& field);
CoefficientField read_coefficient_grid(const std::string& path);

}  // namespace lod
