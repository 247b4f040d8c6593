#pragma once

// thermopiezo command line: check, eval, simulate, oracle.
// Exit codes: 0 pass, 1 a checked condition failed, 2 usage / I/O / parse error.

#include "thermopiezo/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace thermopiezo::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitError = 2;

inline constexpr double kDefaultTol = 1e-10;

/// THERMOPIEZO_TOL replaces the built-in default; --tol replaces both.
inline double default_tolerance() {
  const char *env = std::getenv("THERMOPIEZO_TOL");
  if (env == nullptr || *env == '\0') return kDefaultTol;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(env, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used != std::string(env).size() || !(v >= 0.0) || !std::isfinite(v))
    throw ConfigError(std::string("THERMOPIEZO_TOL is not a non-negative decimal: ") + env);
  return v;
}

struct CliConfig {
  std::string material;
  std::string state;
  std::string sim_config;
  std::string out;
  std::optional<double> tol;
  long long samples = 10000;
  double range = 2.0;
  std::uint64_t seed = 1;
  bool force = false;
};

namespace detail {

/// Writes text to --out if given, otherwise to out.
inline void emit(const std::string &text, const std::string &path, std::ostream &out) {
  if (path.empty()) {
    out << text << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw ParseError("cannot write " + path);
  f << text << '\n';
}

inline double tolerance(const CliConfig &c) { return c.tol ? *c.tol : default_tolerance(); }

} // namespace detail

inline int cmd_check(const CliConfig &c, std::ostream &out, std::ostream &err) {
  const double tol = detail::tolerance(c);
  const auto mv = load_material(c.material);
  AdmissibilityReport rep;
  json j;
  if (const auto *iso = std::get_if<IsoMaterial>(&mv)) {
    rep = check_isotropic(*iso, tol);
    j = to_json(rep, tol);
    j["method"] = "isotropic";
  } else {
    rep = check_numeric(std::get<AnisoMaterial>(mv), tol);
    j = to_json(rep, tol);
    j["method"] = "numeric";
  }
  j["material"] = c.material;
  detail::emit(j.dump(2), c.out, out);
  for (const auto &cond : rep.conditions)
    if (!cond.pass) err << "FAIL [" << cond.group << "] " << cond.name << " (value " << cond.value << ")\n";
  err << (rep.all_pass() ? "admissible: uniqueness hypotheses hold\n" : "not admissible\n");
  return rep.all_pass() ? kExitPass : kExitFail;
}

inline int cmd_eval(const CliConfig &c, std::ostream &out, std::ostream &) {
  const auto m = as_anisotropic(load_material(c.material));
  const auto s = load_state(c.state);
  detail::emit(eval_to_json(m, s).dump(2), c.out, out);
  return kExitPass;
}

inline int cmd_simulate(const CliConfig &c, std::ostream &out, std::ostream &err) {
  const double tol = detail::tolerance(c);
  SimConfig cfg = load_sim_config(c.sim_config);
  cfg.force = cfg.force || c.force;
  const auto rep = check_isotropic(cfg.material, tol);
  if (!rep.all_pass() && !cfg.force) {
    out << json{{"error", "material is not admissible"}, {"admissibility", to_json(rep, tol)}}.dump(2) << '\n';
    err << "material is not admissible; rerun with --force to simulate anyway\n";
    return kExitError;
  }

  const SimResult res = run(cfg);
  const std::string csv = c.out.empty() ? std::string("trace.csv") : c.out;
  {
    std::ofstream f(csv);
    if (!f) throw ParseError("cannot write " + csv);
    write_trace_csv(f, res.trace);
  }
  double max_diss = 0.0, min_diss = 0.0;
  for (std::size_t k = 0; k < res.trace.size(); ++k) {
    max_diss = k == 0 ? res.trace[k].dissipation : std::max(max_diss, res.trace[k].dissipation);
    min_diss = k == 0 ? res.trace[k].dissipation : std::min(min_diss, res.trace[k].dissipation);
  }
  const bool verdict = res.monotone && min_diss >= 0.0;
  out << json{{"steps", cfg.steps},
              {"trace", csv},
              {"initial_lyapunov", res.trace.front().lyapunov},
              {"final_lyapunov", res.trace.back().lyapunov},
              {"max_dissipation", max_diss},
              {"min_dissipation", min_diss},
              {"max_relative_increase", res.max_relative_increase},
              {"monotone", verdict},
              {"forced", cfg.force}}
             .dump(2)
      << '\n';
  err << "lyapunov " << res.trace.front().lyapunov << " -> " << res.trace.back().lyapunov
      << (verdict ? ", non-increasing\n" : ", INCREASED\n");
  if (cfg.force) return kExitPass; // verdict is informational
  return verdict ? kExitPass : kExitFail;
}

inline int cmd_oracle(const CliConfig &c, std::ostream &out, std::ostream &err) {
  if (c.samples < 0) {
    err << "--samples must be non-negative\n";
    return kExitError;
  }
  if (!(c.range > 0.0)) {
    err << "--range must be positive\n";
    return kExitError;
  }
  const double tol = detail::tolerance(c);
  const auto rep = cross_validate(static_cast<std::size_t>(c.samples), c.range, c.seed, tol);
  detail::emit(to_json(rep).dump(2), c.out, out);
  err << rep.tested() << " tested, " << rep.disagreements.size() << " disagreements (seed " << c.seed << ")\n";
  return rep.all_agree() ? kExitPass : kExitFail;
}

inline int run_cli(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
  CLI::App app{"Admissibility checks, constitutive evaluation and 1D simulation for thermopiezoelectric "
               "second-gradient materials",
               "thermopiezo"};
  app.require_subcommand(1, 1);
  CliConfig c;

  auto *check = app.add_subcommand("check", "certify the uniqueness hypotheses of a material file");
  check->add_option("material", c.material, "material JSON")->required();
  check->add_option("--tol", c.tol, "relative tolerance");
  check->add_option("--out", c.out, "write the JSON report here instead of stdout");

  auto *eval = app.add_subcommand("eval", "evaluate the constitutive response at a local state");
  eval->add_option("material", c.material, "material JSON")->required();
  eval->add_option("state", c.state, "state JSON")->required();
  eval->add_option("--out", c.out, "write JSON here instead of stdout");

  auto *sim = app.add_subcommand("simulate", "run the 1D finite-difference model");
  sim->add_option("config", c.sim_config, "simulation config JSON")->required();
  sim->add_option("--out", c.out, "CSV trace path (default trace.csv)");
  sim->add_option("--tol", c.tol, "tolerance for the admissibility gate");
  sim->add_flag("--force", c.force, "run even if the material is not admissible");

  auto *oracle = app.add_subcommand("oracle", "cross-check closed-form conditions against eigenvalues");
  oracle->add_option("--samples", c.samples, "number of random isotropic materials");
  oracle->add_option("--range", c.range, "scalars drawn from [-range, range]");
  oracle->add_option("--seed", c.seed, "RNG seed");
  oracle->add_option("--tol", c.tol, "relative tolerance");
  oracle->add_option("--out", c.out, "write the JSON report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    app.exit(e, out, err);
    return kExitError;
  }

  try {
    if (check->parsed()) return cmd_check(c, out, err);
    if (eval->parsed()) return cmd_eval(c, out, err);
    if (sim->parsed()) return cmd_simulate(c, out, err);
    return cmd_oracle(c, out, err);
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const json::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

} // namespace thermopiezo::cli
