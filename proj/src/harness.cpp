#include "lod/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <stdexcept>

#include "lod/gpe.hpp"
#include "lod/helmholtz.hpp"
#include "lod/interp.hpp"
#include "lod/lodsolve.hpp"
#include "lod/problems.hpp"

namespace lod {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_number(const std::string& s, const char* what) {
  T v{};
  std::string t = trim(s);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw std::invalid_argument(std::string("bad ") + what + " '" + s + "'");
  return v;
}

std::string normalize_key(std::string key) {
  key = trim(key);
  while (!key.empty() && key.front() == '-') key.erase(key.begin());
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

// Number of cells of width h across `side`; h must divide side.
int cell_count(double side, double h, const char* what) {
  if (!(h > 0)) throw std::invalid_argument(std::string(what) + " must be positive");
  double n = side / h;
  long r = std::lround(n);
  if (r < 1 || std::abs(n - static_cast<double>(r)) > 1e-9 * n)
    throw std::invalid_argument(std::string(what) + " = " + std::to_string(h) + " does not divide the domain");
  return static_cast<int>(r);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16g", v);
  return buf;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string ell_name(int ell) { return ell == global_ell ? "global" : std::to_string(ell); }

double primary_error(ProblemKind kind, const ExperimentRecord& r) {
  switch (kind) {
    case ProblemKind::elliptic:
      return r.err_energy_rel;
    case ProblemKind::helmholtz:
      return r.err_kappa_rel;
    case ProblemKind::gpe:
      return r.err_h1;
  }
  return unset;
}

struct Mesh2 {
  CartesianMesh coarse;
  Refinement refinement;
};

Mesh2 meshes(const ExperimentConfig& cfg, double H) {
  const Domain d = cfg.domain();
  const int nf = cell_count(d.side, cfg.fine_h, "fine-h");
  const int n = cell_count(d.side, H, "H");
  if (nf % n != 0) throw std::invalid_argument("fine-h does not divide H = " + std::to_string(H));
  CartesianMesh coarse = build_mesh(d, n);
  return {coarse, refine(coarse, nf / n)};
}

FeSpace reference_space(const ExperimentConfig& cfg, BoundaryCondition bc) {
  const Domain d = cfg.domain();
  return FeSpace(refine(build_mesh(d, cell_count(d.side, cfg.fine_h, "fine-h")), 1), cfg.fine_q, bc);
}

template <class Cell>
StudyResult run_cells(const ExperimentConfig& cfg, Cell&& cell) {
  StudyResult res;
  res.config = cfg;
  for (int ell : cfg.ell)
    for (double H : cfg.H) {
      ExperimentRecord rec;
      rec.H = H;
      rec.ell = ell;
      auto t0 = std::chrono::steady_clock::now();
      try {
        cell(rec);
        double e = primary_error(cfg.problem, rec);
        rec.floor = !std::isnan(e) && e < solver_floor;
      } catch (const std::exception& ex) {
        rec.status = std::string("error: ") + ex.what();
        res.failed = true;
        std::cerr << "cell H=" << H << " ell=" << ell_name(ell) << " failed: " << ex.what() << "\n";
      }
      rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      res.records.push_back(std::move(rec));
    }
  return res;
}

void add_eoc_fits(StudyResult& res, const std::vector<std::pair<std::string, double ExperimentRecord::*>>& quantities) {
  const auto& cfg = res.config;
  if (cfg.H.size() < 2) return;
  for (int ell : cfg.ell)
    for (const auto& [name, member] : quantities) {
      std::vector<double> hs, errs;
      for (const auto& r : res.records)
        if (r.ell == ell && r.status == "ok" && !std::isnan(r.*member)) {
          hs.push_back(r.H);
          errs.push_back(r.*member);
        }
      double floor = member == &ExperimentRecord::err_energy || member == &ExperimentRecord::err_eigenvalue
                         ? 1e-3 * solver_floor
                         : solver_floor;
      double v = fit_eoc(hs, errs, floor);
      if (std::isnan(v)) continue;
      int pts = static_cast<int>(std::count_if(errs.begin(), errs.end(), [&](double e) { return e > 10 * floor; }));
      res.fits.push_back({"eoc", name, static_cast<double>(ell), v, pts});
    }
}

StudyResult elliptic_study(const ExperimentConfig& cfg) {
  const Domain d = cfg.domain();
  CoefficientField a = make_coefficient(cfg.coeff, cfg.seed, d);
  ScalarFunction f = source(cfg.source);
  FeSpace ref_fe = reference_space(cfg, BoundaryCondition::dirichlet_zero);
  Vector<double> reference = solve_reference(ref_fe, a, f);
  Vector<double> load = assemble_mass(ref_fe) * interpolate(ref_fe, f);
  NormEvaluator norms(ref_fe, a);

  return run_cells(cfg, [&](ExperimentRecord& rec) {
    Mesh2 m = meshes(cfg, rec.H);
    FeSpace fe(m.refinement, cfg.fine_q);
    ConstraintSpace space(m.coarse, cfg.p, cfg.mode);
    BilinearForm<double> form = diffusion_form(fe, a);
    LodSolution sol;
    if (rec.ell == global_ell) {
      GlobalLodSolver solver(fe, form.assemble(), assemble_b(space, fe));
      sol = solver.solve(load, cfg.threads);
    } else {
      QuasiInterpolator interp(space, fe);
      CorrectorBuilder<double> builder(fe, space, interp, form);
      LodBasis<double> basis = builder.assemble_basis(rec.ell, cfg.threads);
      sol = solve(assemble_coarse(fe, form, basis, load, cfg.threads), basis);
    }
    RelativeErrors err = errors(norms, sol.fine, reference);
    rec.err_energy_rel = err.energy;
    rec.err_l2_rel = err.l2;
    rec.coarse_dofs = space.size();
    rec.fine_dofs = fe.num_dofs();
  });
}

}  // namespace

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::elliptic:
      return "elliptic";
    case ProblemKind::helmholtz:
      return "helmholtz";
    case ProblemKind::gpe:
      return "gpe";
  }
  return "?";
}

ProblemKind parse_problem(const std::string& s) {
  if (s == "elliptic") return ProblemKind::elliptic;
  if (s == "helmholtz") return ProblemKind::helmholtz;
  if (s == "gpe") return ProblemKind::gpe;
  throw std::invalid_argument("unknown problem '" + s + "' (expected elliptic, helmholtz or gpe)");
}

Domain ExperimentConfig::domain() const {
  return problem == ProblemKind::gpe ? Domain::centered(6.0) : Domain::unit_square();
}

ExperimentConfig default_config(ProblemKind problem) {
  ExperimentConfig cfg;
  cfg.problem = problem;
  switch (problem) {
    case ProblemKind::elliptic:
      break;
    case ProblemKind::helmholtz:
      cfg.p = 2;
      cfg.H = {1.0 / 16};
      cfg.ell = {3};
      cfg.fine_q = 2;
      cfg.coeff = "const:value=1";
      cfg.source = "f3";
      break;
    case ProblemKind::gpe:
      cfg.p = 2;
      cfg.H = {1.5, 0.75, 0.375};
      cfg.ell = {4};
      cfg.fine_h = 1.0 / 16;
      cfg.coeff = "gpe:m=96";
      cfg.source = "none";
      break;
  }
  return cfg;
}

double parse_rational(const std::string& s) {
  auto parts = split(s, '/');
  if (parts.size() == 1) return parse_number<double>(parts[0], "number");
  if (parts.size() != 2) throw std::invalid_argument("bad rational '" + s + "'");
  double den = parse_number<double>(parts[1], "denominator");
  if (den == 0.0) throw std::invalid_argument("zero denominator in '" + s + "'");
  return parse_number<double>(parts[0], "numerator") / den;
}

std::vector<double> parse_rational_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) out.push_back(parse_rational(part));
  return out;
}

std::vector<int> parse_ell_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& part : split(s, ',')) {
    if (part == "global") {
      out.push_back(global_ell);
      continue;
    }
    int v = parse_number<int>(part, "oversampling order");
    if (v < 1) throw std::invalid_argument("oversampling order must be at least 1 or 'global'");
    out.push_back(v);
  }
  return out;
}

void apply_setting(ExperimentConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = normalize_key(raw_key);
  const std::string value = trim(raw_value);
  if (key == "problem") {
    cfg.problem = parse_problem(value);
  } else if (key == "mode") {
    cfg.mode = parse_mode(value);
  } else if (key == "p") {
    cfg.p = parse_number<int>(value, "p");
    if (cfg.p < 1) throw std::invalid_argument("p must be at least 1");
  } else if (key == "H") {
    cfg.H = parse_rational_list(value);
  } else if (key == "ell") {
    cfg.ell = parse_ell_list(value);
  } else if (key == "fine-h") {
    cfg.fine_h = parse_rational(value);
  } else if (key == "fine-q") {
    cfg.fine_q = parse_number<int>(value, "fine-q");
    if (cfg.fine_q < 1) throw std::invalid_argument("fine-q must be at least 1");
  } else if (key == "coeff") {
    cfg.coeff = value;
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(value, "seed");
  } else if (key == "source") {
    cfg.source = value;
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "threads") {
    cfg.threads = parse_number<int>(value, "threads");
    if (cfg.threads < 1) throw std::invalid_argument("threads must be at least 1");
  } else if (key == "kappa") {
    cfg.kappa = parse_rational(value);
  } else if (key == "kappa-g") {
    cfg.kappa_g = parse_rational(value);
  } else {
    throw std::invalid_argument("unknown setting '" + raw_key + "'");
  }
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    try {
      apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

CoefficientField make_coefficient(const std::string& spec, std::uint64_t seed, Domain domain) {
  const auto colon = spec.find(':');
  const std::string kind = trim(spec.substr(0, colon));
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "file") {
    CoefficientField f = read_coefficient_grid(trim(rest));
    if (!(f.domain == domain)) throw std::invalid_argument("coefficient file " + rest + " has a different domain");
    return f;
  }
  std::map<std::string, std::string> params;
  if (!trim(rest).empty())
    for (const auto& kv : split(rest, ',')) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("bad coefficient parameter '" + kv + "'");
      params[trim(kv.substr(0, eq))] = trim(kv.substr(eq + 1));
    }
  auto take = [&](const std::string& name, const std::string& fallback) {
    auto it = params.find(name);
    if (it == params.end()) return fallback;
    std::string v = it->second;
    params.erase(it);
    return v;
  };
  auto finish = [&](CoefficientField f) {
    if (!params.empty())
      throw std::invalid_argument("unknown parameter '" + params.begin()->first + "' for coefficient " + kind);
    return f;
  };
  const std::string seed_str = std::to_string(seed);
  if (kind == "a1") {
    int m = parse_number<int>(take("m", "32"), "m");
    auto s = parse_number<std::uint64_t>(take("seed", seed_str), "seed");
    if (!(domain == Domain::unit_square())) throw std::invalid_argument("a1 lives on the unit square");
    return finish(coefficient_a1(m, s, domain));
  }
  if (kind == "a2") {
    int m = parse_number<int>(take("m", "64"), "m");
    auto s = parse_number<std::uint64_t>(take("seed", seed_str), "seed");
    return finish(coefficient_a2(m, s, domain));
  }
  if (kind == "const") {
    double v = parse_rational(take("value", "1"));
    return finish(CoefficientField::constant(domain, v));
  }
  if (kind == "gpe") {
    int m = parse_number<int>(take("m", "96"), "m");
    double amp = parse_rational(take("amplitude", "40"));
    return finish(gpe_potential(m, amp, domain));
  }
  throw std::invalid_argument("unknown coefficient kind '" + kind + "' (expected a1, a2, const, gpe or file)");
}

double fit_eoc(const std::vector<double>& H, const std::vector<double>& err, double floor) {
  if (H.size() != err.size()) throw std::invalid_argument("fit_eoc: size mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < H.size(); ++i) {
    if (!(err[i] > 10 * floor)) continue;
    double x = std::log(H[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return unset;
  double den = n * sxx - sx * sx;
  if (den == 0.0) return unset;
  return (n * sxy - sx * sy) / den;
}

double decay_factor(const std::vector<double>& err, double floor) {
  std::size_t k = 0;
  while (k < err.size() && err[k] > floor) ++k;
  if (k < 2) return unset;
  return std::pow(err[k - 1] / err[0], 1.0 / static_cast<double>(k - 1));
}

StudyResult run_convergence(const ExperimentConfig& cfg) {
  switch (cfg.problem) {
    case ProblemKind::helmholtz:
      return run_helmholtz(cfg);
    case ProblemKind::gpe:
      return run_gpe(cfg);
    case ProblemKind::elliptic:
      break;
  }
  StudyResult res = elliptic_study(cfg);
  add_eoc_fits(res, {{"err_energy_rel", &ExperimentRecord::err_energy_rel}, {"err_l2_rel", &ExperimentRecord::err_l2_rel}});
  return res;
}

StudyResult run_decay(const ExperimentConfig& cfg) {
  if (cfg.problem != ProblemKind::elliptic) throw std::invalid_argument("decay studies use the elliptic problem");
  if (cfg.source != "f2")
    throw std::invalid_argument("decay studies need a source in the constraint space; use f2");
  if (cfg.H.size() != 1) throw std::invalid_argument("decay studies take a single H");
  StudyResult res = elliptic_study(cfg);
  std::vector<std::pair<int, double>> series;
  for (const auto& r : res.records)
    if (r.status == "ok" && r.ell != global_ell) series.emplace_back(r.ell, r.err_energy_rel);
  std::sort(series.begin(), series.end());
  std::vector<double> errs;
  for (const auto& s : series) errs.push_back(s.second);
  double v = decay_factor(errs);
  if (!std::isnan(v)) {
    int pts = static_cast<int>(std::count_if(errs.begin(), errs.end(), [](double e) { return e > solver_floor; }));
    res.fits.push_back({"decay", "err_energy_rel", cfg.H[0], v, pts});
  }
  return res;
}

StudyResult run_helmholtz(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.problem = ProblemKind::helmholtz;
  const Domain d = c.domain();
  HelmholtzProblem prob;
  prob.a = make_coefficient(c.coeff, c.seed, d);
  prob.v = CoefficientField::constant(d, 1.0);
  prob.kappa = c.kappa;
  prob.f = source(c.source);
  FeSpace ref_fe = reference_space(c, BoundaryCondition::robin);
  Vector<Complex> reference = solve_helmholtz_reference(ref_fe, prob);

  StudyResult res = run_cells(c, [&](ExperimentRecord& rec) {
    Mesh2 m = meshes(c, rec.H);
    FeSpace fe(m.refinement, c.fine_q, BoundaryCondition::robin);
    ConstraintSpace space(m.coarse, c.p, c.mode);
    HelmholtzResult out = solve_helmholtz_lod(fe, prob, space, rec.ell, c.threads, &reference);
    rec.err_kappa_rel = out.err_kappa_rel;
    rec.coarse_dofs = out.coarse_dofs;
    rec.fine_dofs = out.fine_dofs;
  });
  add_eoc_fits(res, {{"err_kappa_rel", &ExperimentRecord::err_kappa_rel}});
  return res;
}

StudyResult run_gpe(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.problem = ProblemKind::gpe;
  const Domain d = c.domain();
  GpeProblem prob;
  prob.potential = make_coefficient(c.coeff, c.seed, d);
  prob.interaction = c.kappa_g;
  FeSpace ref_fe = reference_space(c, BoundaryCondition::dirichlet_zero);
  GroundState reference = fine_ground_state(ref_fe, prob);
  NormEvaluator norms(ref_fe, CoefficientField::constant(d, 1.0));

  StudyResult res = run_cells(c, [&](ExperimentRecord& rec) {
    Mesh2 m = meshes(c, rec.H);
    FeSpace fe(m.refinement, c.fine_q);
    ConstraintSpace space(m.coarse, c.p, c.mode);
    LodBasis<double> basis = build_gpe_basis(fe, prob, space, rec.ell, c.threads);
    GroundState gs = ground_state(fe, prob, basis, {}, c.threads);
    GpeErrors err = gpe_errors(norms, gs, reference);
    rec.energy = gs.energy;
    rec.eigenvalue = gs.eigenvalue;
    rec.err_h1 = err.h1;
    rec.err_l2 = err.l2;
    rec.err_energy = err.energy;
    rec.err_eigenvalue = err.eigenvalue;
    rec.coarse_dofs = basis.size();
    rec.fine_dofs = fe.num_dofs();
  });
  add_eoc_fits(res, {{"err_h1", &ExperimentRecord::err_h1},
                     {"err_l2", &ExperimentRecord::err_l2},
                     {"err_energy", &ExperimentRecord::err_energy},
                     {"err_eigenvalue", &ExperimentRecord::err_eigenvalue}});
  return res;
}

void write_csv(const std::string& path, const StudyResult& result) {
  FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  const auto& c = result.config;
  std::fprintf(out,
               "problem,mode,p,H,ell,fine_h,fine_q,coeff,source,seed,kappa,kappa_g,coarse_dofs,fine_dofs,"
               "err_energy_rel,err_l2_rel,err_kappa_rel,energy,eigenvalue,err_h1,err_l2,err_energy,err_eigenvalue,"
               "floor,status\n");
  const std::string kappa = c.problem == ProblemKind::helmholtz ? format_double(c.kappa) : "";
  const std::string kappa_g = c.problem == ProblemKind::gpe ? format_double(c.kappa_g) : "";
  for (const auto& r : result.records) {
    std::string row = to_string(c.problem) + "," + to_string(c.mode) + "," + std::to_string(c.p) + "," +
                      format_double(r.H) + "," + ell_name(r.ell) + "," + format_double(c.fine_h) + "," +
                      std::to_string(c.fine_q) + "," + quote(c.coeff) + "," + quote(c.source) + "," +
                      std::to_string(c.seed) + "," + kappa + "," + kappa_g + "," + std::to_string(r.coarse_dofs) +
                      "," + std::to_string(r.fine_dofs);
    for (double v : {r.err_energy_rel, r.err_l2_rel, r.err_kappa_rel, r.energy, r.eigenvalue, r.err_h1, r.err_l2,
                     r.err_energy, r.err_eigenvalue})
      row += "," + format_double(v);
    row += std::string(",") + (r.floor ? "1" : "0") + "," + quote(r.status);
    std::fprintf(out, "%s\n", row.c_str());
  }
  for (const auto& f : result.fits)
    std::fprintf(out, "# %s %s %s=%s value=%s points=%d\n", f.kind.c_str(), f.quantity.c_str(),
                 f.kind == "eoc" ? "ell" : "H",
                 f.kind == "eoc" ? ell_name(static_cast<int>(f.key)).c_str() : format_double(f.key).c_str(),
                 format_double(f.value).c_str(), f.points);
  if (std::fclose(out) != 0) throw std::runtime_error("failed to write " + path);
}

void write_timing(const std::string& path, const StudyResult& result) {
  FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  std::fprintf(out, "H,ell,ms\n");
  for (const auto& r : result.records)
    std::fprintf(out, "%s,%s,%.3f\n", format_double(r.H).c_str(), ell_name(r.ell).c_str(), r.ms);
  if (std::fclose(out) != 0) throw std::runtime_error("failed to write " + path);
}

void write_gnuplot(const std::string& path, const StudyResult& result) {
  FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  const auto& c = result.config;
  bool first = true;
  for (int ell : c.ell) {
    if (!first) std::fprintf(out, "\n\n");
    first = false;
    std::fprintf(out, "# ell=%s\n# H error\n", ell_name(ell).c_str());
    for (const auto& r : result.records)
      if (r.ell == ell && r.status == "ok")
        std::fprintf(out, "%s %s\n", format_double(r.H).c_str(), format_double(primary_error(c.problem, r)).c_str());
  }
  if (std::fclose(out) != 0) throw std::runtime_error("failed to write " + path);
}

}  // namespace lod
