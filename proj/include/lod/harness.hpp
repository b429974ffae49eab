#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "lod/constraints.hpp"
#include "lod/corrector.hpp"
#include "lod/fem.hpp"

namespace lod {

enum class ProblemKind { elliptic, helmholtz, gpe };

std::string to_string(ProblemKind kind);
ProblemKind parse_problem(const std::string& s);

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::elliptic;
  ConstraintMode mode = ConstraintMode::dg;
  int p = 1;
  std::vector<double> H{0.5, 0.25, 0.125, 0.0625};
  std::vector<int> ell{global_ell};
  double fine_h = 1.0 / 128;
  int fine_q = 1;
  std::string coeff = "a1:m=32";
  std::string source = "f1";
  std::uint64_t seed = 0;
  std::string out;
  int threads = 1;
  double kappa = 16.0;     // Helmholtz wavenumber
  double kappa_g = 100.0;  // GPE interaction

  /// Domain of the problem: (-6, 6)^2 for gpe, the unit square otherwise.
  Domain domain() const;
};

/// Defaults of each subcommand before config files and flags are applied.
ExperimentConfig default_config(ProblemKind problem);

/// "a/b" or a decimal number.
double parse_rational(const std::string& s);
std::vector<double> parse_rational_list(const std::string& s);
/// Comma-separated integers; "global" selects global patches.
std::vector<int> parse_ell_list(const std::string& s);

/// Sets one config key (flag name without dashes, '_' and '-' equivalent).
/// Throws std::invalid_argument for unknown keys or bad values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Applies a `key = value` file with `#` comments.
void apply_config_file(ExperimentConfig& cfg, const std::string& path);

/// Coefficient from a spec such as "a1:m=32,seed=7", "a2:m=64", "const:value=1",
/// "gpe:m=96,amplitude=40" or "file:path". Seeds default to `seed`.
CoefficientField make_coefficient(const std::string& spec, std::uint64_t seed, Domain domain);

/// Marks metrics that do not apply to a record; written as empty CSV fields.
inline constexpr double unset = std::numeric_limits<double>::quiet_NaN();

struct ExperimentRecord {
  double H = 0.0;
  int ell = 0;
  int coarse_dofs = 0;
  int fine_dofs = 0;
  double err_energy_rel = unset;
  double err_l2_rel = unset;
  double err_kappa_rel = unset;
  double energy = unset;
  double eigenvalue = unset;
  double err_h1 = unset;
  double err_l2 = unset;
  double err_energy = unset;
  double err_eigenvalue = unset;
  bool floor = false;  // primary error below the solver floor
  std::string status = "ok";
  double ms = 0.0;
};

/// Fitted rate or decay factor of one quantity along one ell (or H) series.
struct Fit {
  std::string kind;  // "eoc" or "decay"
  std::string quantity;
  double key = 0.0;  // ell for eoc, H for decay
  double value = 0.0;
  int points = 0;
};

struct StudyResult {
  ExperimentConfig config;
  std::vector<ExperimentRecord> records;
  std::vector<Fit> fits;
  bool failed = false;
};

inline constexpr double solver_floor = 1e-9;

/// Least-squares slope of log(err) against log(H) over the records with
/// err > 10 * floor. NaN with fewer than two such records.
double fit_eoc(const std::vector<double>& H, const std::vector<double>& err, double floor = solver_floor);

/// Geometric mean of successive ratios err[k+1] / err[k] over the leading run
/// of errors above the floor. NaN with fewer than two such errors.
double decay_factor(const std::vector<double>& err, double floor = solver_floor);

/// One record per (H, ell) with EOC fits per ell. Dispatches on cfg.problem.
StudyResult run_convergence(const ExperimentConfig& cfg);
/// Single H, records per ell, decay factor. Requires the source f2.
StudyResult run_decay(const ExperimentConfig& cfg);
StudyResult run_helmholtz(const ExperimentConfig& cfg);
StudyResult run_gpe(const ExperimentConfig& cfg);

/// Fixed-column CSV (16 significant digits) followed by `# eoc ...` or
/// `# decay ...` lines. Timings are written to a separate `<path>.timing.csv`
/// so the main file is reproducible bitwise.
void write_csv(const std::string& path, const StudyResult& result);
void write_timing(const std::string& path, const StudyResult& result);
/// Gnuplot data: one index block per ell with columns H and the primary error.
void write_gnuplot(const std::string& path, const StudyResult& result);

}  // namespace lod
