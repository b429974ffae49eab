#include "lod/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace lod {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double keyed_uniform(std::uint64_t seed, std::int64_t i, std::int64_t j) {
  std::uint64_t z = splitmix64(seed);
  z = splitmix64(z ^ static_cast<std::uint64_t>(i));
  z = splitmix64(z ^ static_cast<std::uint64_t>(j));
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

CoefficientField random_checkerboard(Domain domain, int m, std::uint64_t seed, double lo, double hi) {
  if (m < 1) throw std::invalid_argument("grid size must be positive");
  CoefficientField f;
  f.domain = domain;
  f.m = m;
  f.values.resize(static_cast<std::size_t>(m) * m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) f.values[static_cast<std::size_t>(j) * m + i] = lo + (hi - lo) * keyed_uniform(seed, i, j);
  return f;
}

double parabola_distance(double x, double y) {
  auto d2 = [&](double t) {
    double py = (2 * t - 1) * (2 * t - 1);
    return (x - t) * (x - t) + (y - py) * (y - py);
  };
  // coarse scan, then Newton on the derivative of the squared distance
  const int samples = 4000;
  const double t0 = -1.0, t1 = 2.0, dt = (t1 - t0) / samples;
  double best_t = t0, best = d2(t0);
  for (int k = 1; k <= samples; ++k) {
    double t = t0 + k * dt;
    double v = d2(t);
    if (v < best) best = v, best_t = t;
  }
  double t = best_t;
  for (int it = 0; it < 20; ++it) {
    double s = 2 * t - 1, py = s * s;
    double g = -2 * (x - t) - 8 * (y - py) * s;
    double h = 2 + 32 * s * s - 8 * (y - py);
    if (h <= 0) break;
    double next = std::clamp(t - g / h, best_t - dt, best_t + dt);
    if (next == t) break;
    t = next;
  }
  return std::sqrt(std::min(best, d2(t)));
}

CoefficientField coefficient_a1(int m, std::uint64_t seed, Domain domain) {
  if (m < 4) throw std::invalid_argument("coefficient A1 needs m >= 4");
  CoefficientField f = random_checkerboard(domain, m, seed);
  const double eps = 1.0 / m;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i)
      if (parabola_distance((i + 0.5) * eps, (j + 0.5) * eps) <= 4 * eps) f.values[static_cast<std::size_t>(j) * m + i] = 2.0;
  return f;
}

CoefficientField coefficient_a2(int m, std::uint64_t seed, Domain domain) { return random_checkerboard(domain, m, seed); }

double tent(double t) {
  double frac = t - std::floor(t);
  return 1.0 - std::abs(2.0 * frac - 1.0);
}

CoefficientField gpe_potential(int m, double amplitude, Domain domain) {
  if (m < 1) throw std::invalid_argument("grid size must be positive");
  CoefficientField f;
  f.domain = domain;
  f.m = m;
  f.values.resize(static_cast<std::size_t>(m) * m);
  const double h = domain.side / m;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      double x = domain.x0 + (i + 0.5) * h, y = domain.y0 + (j + 0.5) * h;
      f.values[static_cast<std::size_t>(j) * m + i] = 0.5 * (x * x + y * y) + amplitude * tent(x) * tent(y);
    }
  return f;
}

ScalarFunction source(std::string_view name) {
  using std::numbers::pi;
  if (name == "f1") return [](double x, double y) { return 2 * pi * pi * std::sin(pi * x) * std::sin(pi * y); };
  if (name == "f2") return [](double, double) { return 1.0; };
  if (name == "f3")
    return [](double x, double y) {
      const double r2 = (x - 0.125) * (x - 0.125) + (y - 0.125) * (y - 0.125);
      const double rho2 = 1.0 / 400.0;
      if (r2 >= rho2) return 0.0;
      return 1e4 * std::exp(-1.0 / (1.0 - r2 / rho2));
    };
  throw std::invalid_argument("unknown source '" + std::string(name) + "' (expected f1, f2 or f3)");
}

void write_coefficient_grid(const std::string& path, const CoefficientField& field) {
  FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  std::fprintf(out, "m %d\n", field.m);
  std::fprintf(out, "domain %.17g %.17g %.17g\n", field.domain.x0, field.domain.y0, field.domain.side);
  for (int j = 0; j < field.m; ++j)
    for (int i = 0; i < field.m; ++i) std::fprintf(out, "%.17g%c", field.at(i, j), i + 1 == field.m ? '\n' : ' ');
  if (std::fclose(out) != 0) throw std::runtime_error("failed to write " + path);
}

CoefficientField read_coefficient_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string key;
  CoefficientField f;
  if (!(in >> key >> f.m) || key != "m" || f.m < 1) throw std::runtime_error(path + ": bad 'm' header");
  if (!(in >> key >> f.domain.x0 >> f.domain.y0 >> f.domain.side) || key != "domain" || !(f.domain.side > 0))
    throw std::runtime_error(path + ": bad 'domain' header");
  f.values.resize(static_cast<std::size_t>(f.m) * f.m);
  for (double& v : f.values)
    if (!(in >> v)) throw std::runtime_error(path + ": expected " + std::to_string(f.values.size()) + " values");
  return f;
}

}  // namespace lod
