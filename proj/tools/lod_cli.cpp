#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lod/harness.hpp"
#include "lod/problems.hpp"

namespace {

const std::vector<std::pair<std::string, std::string>> kFlags = {
    {"problem", "elliptic | helmholtz | gpe"},
    {"mode", "constraint space: cg | dg"},
    {"p", "polynomial degree of the constraint space"},
    {"H", "coarse mesh sizes, comma-separated (a/b allowed)"},
    {"ell", "oversampling orders, comma-separated, or 'global'"},
    {"fine-h", "fine mesh size"},
    {"fine-q", "polynomial degree of the fine space"},
    {"coeff", "coefficient, e.g. a1:m=32,seed=7 | a2:m=64 | const:value=1 | gpe:m=96 | file:path"},
    {"seed", "default seed of random coefficients"},
    {"source", "f1 | f2 | f3"},
    {"out", "output CSV path (grid file for export-coefficient)"},
    {"threads", "worker threads for corrector problems"},
    {"kappa", "Helmholtz wavenumber"},
    {"kappa-g", "Gross-Pitaevskii interaction strength"},
};

struct Command {
  CLI::App* app = nullptr;
  std::string config;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

void add_flags(Command& cmd) {
  cmd.app->add_option("--config", cmd.config, "key = value file; flags given on the command line take precedence");
  for (const auto& [name, help] : kFlags) cmd.options[name] = cmd.app->add_option("--" + name, cmd.values[name], help);
}

lod::ExperimentConfig build_config(const Command& cmd, lod::ProblemKind problem) {
  lod::ExperimentConfig cfg = lod::default_config(problem);
  if (!cmd.config.empty()) lod::apply_config_file(cfg, cmd.config);
  // --problem first so the remaining flags see the right problem
  if (cmd.options.at("problem")->count() > 0) lod::apply_setting(cfg, "problem", cmd.values.at("problem"));
  for (const auto& [name, opt] : cmd.options)
    if (name != "problem" && opt->count() > 0) lod::apply_setting(cfg, name, cmd.values.at(name));
  return cfg;
}

int emit(const lod::StudyResult& result) {
  const auto& cfg = result.config;
  if (cfg.out.empty()) {
    lod::write_csv("/dev/stdout", result);
  } else {
    lod::write_csv(cfg.out, result);
    lod::write_timing(cfg.out + ".timing.csv", result);
    lod::write_gnuplot(cfg.out + ".dat", result);
    for (const auto& f : result.fits)
      std::printf("%s %s (%s) = %.4f over %d points\n", f.kind.c_str(), f.quantity.c_str(),
                  f.kind == "eoc" ? ("ell " + (f.key < 0 ? std::string("global") : std::to_string(int(f.key)))).c_str()
                                  : ("H " + std::to_string(f.key)).c_str(),
                  f.value, f.points);
  }
  return result.failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Localized orthogonal decomposition experiments"};
  app.require_subcommand(1);

  std::map<std::string, Command> commands;
  const std::vector<std::pair<std::string, std::string>> subs = {
      {"run-convergence", "errors over a list of coarse mesh sizes, with fitted EOC per ell"},
      {"run-decay", "errors over a list of oversampling orders at one H (source f2)"},
      {"run-helmholtz", "Helmholtz problem with Robin boundary, Petrov-Galerkin LOD"},
      {"run-gpe", "Gross-Pitaevskii ground states on the LOD space"},
      {"export-coefficient", "write a coefficient field as a plain-text grid"},
  };
  for (const auto& [name, help] : subs) {
    Command& cmd = commands[name];
    cmd.app = app.add_subcommand(name, help);
    add_flags(cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  std::string chosen;
  for (auto& [name, cmd] : commands)
    if (cmd.app->parsed()) chosen = name;
  const Command& cmd = commands.at(chosen);

  lod::ExperimentConfig cfg;
  try {
    lod::ProblemKind problem = lod::ProblemKind::elliptic;
    if (chosen == "run-helmholtz") problem = lod::ProblemKind::helmholtz;
    if (chosen == "run-gpe") problem = lod::ProblemKind::gpe;
    if (chosen == "export-coefficient" && cmd.values.at("coeff").rfind("gpe", 0) == 0) problem = lod::ProblemKind::gpe;
    cfg = build_config(cmd, problem);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n\n" << cmd.app->help();
    return 2;
  }

  try {
    if (chosen == "export-coefficient") {
      if (cfg.out.empty()) throw std::invalid_argument("export-coefficient needs --out");
      lod::write_coefficient_grid(cfg.out, lod::make_coefficient(cfg.coeff, cfg.seed, cfg.domain()));
      return 0;
    }
    if (chosen == "run-convergence") return emit(lod::run_convergence(cfg));
    if (chosen == "run-decay") return emit(lod::run_decay(cfg));
    if (chosen == "run-helmholtz") return emit(lod::run_helmholtz(cfg));
    return emit(lod::run_gpe(cfg));
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
