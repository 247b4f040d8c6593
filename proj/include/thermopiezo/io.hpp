#pragma once

// JSON readers and writers for materials, local states, simulation configs
// and reports, plus the CSV trace writer.

#include "thermopiezo/admissibility.hpp"
#include "thermopiezo/constitutive.hpp"
#include "thermopiezo/material.hpp"
#include "thermopiezo/simulator1d.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <variant>

namespace thermopiezo {

using json = nlohmann::json;

namespace detail {

inline json read_json_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error &e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline double number_field(const json &obj, const std::string &key) {
  const auto &v = obj.at(key);
  if (!v.is_number()) throw ParseError("field \"" + key + "\" must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError("field \"" + key + "\" is not finite");
  return d;
}

inline double required_number(const json &obj, const std::string &key) {
  if (!obj.contains(key)) throw MissingFieldError(key);
  return number_field(obj, key);
}

inline double optional_number(const json &obj, const std::string &key, double fallback) {
  return obj.contains(key) ? number_field(obj, key) : fallback;
}

inline void reject_unknown_keys(const json &obj, const std::set<std::string> &allowed, const std::string &where) {
  if (!obj.is_object()) throw ParseError(where + " must be a JSON object");
  for (const auto &[key, _] : obj.items())
    if (!allowed.contains(key)) throw ParseError("unknown key \"" + key + "\" in " + where);
}

template <std::size_t N>
std::array<double, N> number_array(const json &obj, const std::string &key) {
  const auto &v = obj.at(key);
  if (!v.is_array() || v.size() != N)
    throw ParseError("field \"" + key + "\" must be an array of " + std::to_string(N) + " numbers");
  std::array<double, N> out{};
  for (std::size_t k = 0; k < N; ++k) {
    if (!v[k].is_number()) throw ParseError("field \"" + key + "\" has a non-numeric entry at " + std::to_string(k));
    out[k] = v[k].get<double>();
    if (!std::isfinite(out[k])) throw ParseError("field \"" + key + "\" has a non-finite entry");
  }
  return out;
}

template <std::size_t N>
json to_array(const std::array<double, N> &a) {
  return json(std::vector<double>(a.begin(), a.end()));
}

} // namespace detail

// ---------------------------------------------------------------------------
// Materials

using MaterialVariant = std::variant<IsoMaterial, AnisoMaterial>;

inline IsoMaterial parse_isotropic(const json &j) {
  std::set<std::string> allowed{"kind"};
  IsoMaterial m;
  IsoMaterial::for_each_field(m, [&](const char *name, double &) { allowed.insert(name); });
  detail::reject_unknown_keys(j, allowed, "isotropic material");
  IsoMaterial::for_each_field(m, [&](const char *name, double &v) {
    v = std::string(name) == "alpha4" ? detail::optional_number(j, name, 0.0) : detail::required_number(j, name);
  });
  return m;
}

/// Tensors are flat row-major arrays over full index ranges; absent tensors are zero.
inline AnisoMaterial parse_anisotropic(const json &j, double sym_tol = 1e-10) {
  std::set<std::string> allowed{"kind", "rho", "T0", "beta", "alpha4", "gamma", "a44"};
  AnisoMaterial m;
  AnisoMaterial::for_each_tensor(m, [&](const char *name, auto &) { allowed.insert(name); });
  detail::reject_unknown_keys(j, allowed, "anisotropic material");
  m.rho = detail::required_number(j, "rho");
  m.T0 = detail::required_number(j, "T0");
  m.beta = detail::required_number(j, "beta");
  m.gamma = detail::required_number(j, "gamma");
  m.a44 = detail::required_number(j, "a44");
  m.alpha4 = detail::optional_number(j, "alpha4", 0.0);
  AnisoMaterial::for_each_tensor(m, [&](const char *name, auto &t) {
    if (j.contains(name)) t.data = detail::number_array<std::remove_reference_t<decltype(t)>::size>(j, name);
  });
  const auto rep = validate_symmetries(m, sym_tol);
  if (!rep.pass()) {
    const auto *w = rep.worst_failure();
    std::ostringstream msg;
    msg << "material violates " << w->relation << " (max violation " << w->max_violation << ")";
    throw SymmetryViolationError(msg.str(), {-1, -1, -1}, w->max_violation);
  }
  return m;
}

inline MaterialVariant parse_material(const json &j) {
  if (!j.is_object()) throw ParseError("material must be a JSON object");
  if (!j.contains("kind")) throw MissingFieldError("kind");
  if (!j.at("kind").is_string()) throw ParseError("field \"kind\" must be a string");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "isotropic") return parse_isotropic(j);
  if (kind == "anisotropic") return parse_anisotropic(j);
  throw ParseError("unknown material kind \"" + kind + "\" (expected isotropic or anisotropic)");
}

inline MaterialVariant load_material(const std::filesystem::path &path) {
  return parse_material(detail::read_json_file(path));
}

inline AnisoMaterial as_anisotropic(const MaterialVariant &m) {
  if (const auto *iso = std::get_if<IsoMaterial>(&m)) return expand_isotropic(*iso);
  return std::get<AnisoMaterial>(m);
}

inline json to_json(const IsoMaterial &m) {
  json j;
  j["kind"] = "isotropic";
  IsoMaterial::for_each_field(m, [&](const char *name, const double &v) { j[name] = v; });
  return j;
}

inline json to_json(const AnisoMaterial &m) {
  json j;
  j["kind"] = "anisotropic";
  j["rho"] = m.rho;
  j["T0"] = m.T0;
  j["beta"] = m.beta;
  j["alpha4"] = m.alpha4;
  j["gamma"] = m.gamma;
  j["a44"] = m.a44;
  AnisoMaterial::for_each_tensor(m, [&](const char *name, const auto &t) { j[name] = detail::to_array(t.data); });
  return j;
}

// ---------------------------------------------------------------------------
// Local state (eval)

/// Keys: e (6, slot order 11 22 33 23 13 12), kappa (27, u_{k,ij} row-major in
/// (i,j,k)), E (3), V (6), theta, thetaDot, gradTheta (3), uDot (3). Missing
/// keys are zero.
inline LocalState parse_state(const json &j) {
  detail::reject_unknown_keys(j, {"e", "kappa", "E", "V", "theta", "thetaDot", "gradTheta", "uDot"}, "state");
  LocalState s;
  if (j.contains("e")) s.e.v = detail::number_array<6>(j, "e");
  if (j.contains("kappa")) {
    FullTensor<3> h;
    h.data = detail::number_array<27>(j, "kappa");
    s.kappa = kappa_from_second_gradient(h).kappa;
  }
  if (j.contains("E")) s.E = detail::number_array<3>(j, "E");
  if (j.contains("V")) s.V.v = detail::number_array<6>(j, "V");
  s.theta = detail::optional_number(j, "theta", 0.0);
  s.thetaDot = detail::optional_number(j, "thetaDot", 0.0);
  if (j.contains("gradTheta")) s.gradTheta = detail::number_array<3>(j, "gradTheta");
  if (j.contains("uDot")) s.uDot = detail::number_array<3>(j, "uDot");
  return s;
}

inline LocalState load_state(const std::filesystem::path &path) { return parse_state(detail::read_json_file(path)); }

inline json eval_to_json(const AnisoMaterial &m, const LocalState &s) {
  const Response r = evaluate(m, s);
  json resp;
  resp["tau"] = detail::to_array(r.tau.v);
  resp["mu"] = detail::to_array(r.muTensor.full().data);
  resp["sigma"] = detail::to_array(r.sigma);
  resp["rhoEta"] = r.rhoEta;
  resp["Q"] = detail::to_array(r.Q.v);
  resp["q"] = detail::to_array(r.q);
  const double z = s.z(m.beta);
  json forms;
  forms["W"] = form_W(m, s.e, s.kappa);
  forms["F"] = form_F(m, s.E, s.V, z);
  forms["G"] = form_G(m, s.E, s.V, z);
  forms["P"] = form_P(m, s.thetaDot, s.gradTheta);
  forms["lyapunov_density"] = lyapunov_density(m, s);
  return json{{"response", resp}, {"forms", forms}};
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const AdmissibilityReport &r, double tol) {
  json conds = json::array();
  for (const auto &c : r.conditions)
    conds.push_back({{"name", c.name}, {"group", c.group}, {"value", c.value}, {"strict", c.strict},
                     {"scale", c.scale}, {"pass", c.pass}});
  json j{{"tolerance", tol},
         {"conditions", conds},
         {"W_psd", r.W_psd},
         {"G_pd", r.G_pd},
         {"P_psd", r.P_psd},
         {"theorem1_hypotheses", r.theorem1_hypotheses},
         {"theorem2_hypotheses", r.theorem2_hypotheses},
         {"all_pass", r.all_pass()}};
  if (!r.symmetry.empty()) {
    json sym = json::array();
    for (const auto &s : r.symmetry)
      sym.push_back({{"relation", s.relation}, {"max_violation", s.max_violation}, {"tolerance", s.tolerance},
                     {"pass", s.pass}});
    j["symmetry"] = sym;
  }
  return j;
}

inline json to_json(const AgreementReport &r) {
  auto form = [](const FormAgreement &f) {
    return json{{"tested", f.tested}, {"agreed", f.agreed}, {"boundary", f.boundary}, {"numeric_pass", f.numeric_pass}};
  };
  json dis = json::array();
  for (const auto &d : r.disagreements)
    dis.push_back({{"sample", d.sample},
                   {"form", d.form},
                   {"closed_form", d.closed_form},
                   {"numeric", d.numeric},
                   {"min_eigenvalue", d.min_eigenvalue},
                   {"matrix_scale", d.matrix_scale},
                   {"material", to_json(d.material)}});
  return json{{"samples", r.samples},   {"range", r.range}, {"seed", r.seed},
              {"boundary_band", r.boundary_band}, {"tested", r.tested()}, {"agreement", r.fraction()},
              {"W", form(r.W)},          {"W2", form(r.W2)},  {"G", form(r.G)},   {"P", form(r.P)},
              {"disagreements", dis},    {"all_agree", r.all_agree()}};
}

// ---------------------------------------------------------------------------
// Simulation config

namespace detail {

/// Array of N numbers, or {"profile": zero | sine | random_clamped | random_dirichlet, ...}.
inline Eigen::VectorXd parse_profile(const json &j, const Grid1D &g, const std::string &field) {
  if (j.is_array()) {
    if (static_cast<int>(j.size()) != g.N)
      throw ParseError("\"" + field + "\" has " + std::to_string(j.size()) + " values, grid has " +
                       std::to_string(g.N) + " interior nodes");
    Eigen::VectorXd v(g.N);
    for (int k = 0; k < g.N; ++k) {
      if (!j[k].is_number()) throw ParseError("\"" + field + "\" has a non-numeric entry");
      v[k] = j[k].get<double>();
    }
    return v;
  }
  reject_unknown_keys(j, {"profile", "seed", "modes", "amplitude", "mode"}, "profile \"" + field + "\"");
  if (!j.contains("profile")) throw MissingFieldError(field + ".profile");
  const auto name = j.at("profile").get<std::string>();
  const double amp = optional_number(j, "amplitude", 1.0);
  const auto seed = j.value("seed", std::uint64_t{0});
  const int modes = j.value("modes", 4);
  if (name == "zero") return Eigen::VectorXd::Zero(g.N);
  if (name == "sine") return sine_profile(g, j.value("mode", 1), amp);
  if (name == "random_clamped") return random_clamped_profile(g, seed, modes, amp);
  if (name == "random_dirichlet") return random_dirichlet_profile(g, seed, modes, amp);
  throw ParseError("unknown profile \"" + name + "\" for \"" + field + "\"");
}

} // namespace detail

/// "material" may be an inline object or a path relative to the config file.
inline SimConfig parse_sim_config(const json &j, const std::filesystem::path &base_dir = {}) {
  detail::reject_unknown_keys(j, {"material", "grid", "dt", "steps", "initial", "sources", "force"}, "simulation config");
  SimConfig cfg;
  if (!j.contains("material")) throw MissingFieldError("material");
  const auto &mj = j.at("material");
  const MaterialVariant mv = mj.is_string() ? load_material(base_dir / mj.get<std::string>()) : parse_material(mj);
  if (!std::holds_alternative<IsoMaterial>(mv)) throw ConfigError("the 1D simulator needs an isotropic material");
  cfg.material = std::get<IsoMaterial>(mv);

  if (!j.contains("grid")) throw MissingFieldError("grid");
  const auto &gj = j.at("grid");
  detail::reject_unknown_keys(gj, {"N", "L"}, "grid");
  if (!gj.contains("N")) throw MissingFieldError("grid.N");
  if (!gj.at("N").is_number_integer()) throw ParseError("grid.N must be an integer");
  cfg.grid = Grid1D::make(gj.at("N").get<int>(), detail::optional_number(gj, "L", 1.0));

  cfg.dt = detail::required_number(j, "dt");
  if (!j.contains("steps")) throw MissingFieldError("steps");
  if (!j.at("steps").is_number_integer()) throw ParseError("steps must be an integer");
  cfg.steps = j.at("steps").get<long>();
  cfg.force = j.value("force", false);

  const json init = j.value("initial", json::object());
  detail::reject_unknown_keys(init, {"u0", "v0", "theta0", "eta0", "thetaDot0"}, "initial");
  auto profile = [&](const char *key) {
    return init.contains(key) ? detail::parse_profile(init.at(key), cfg.grid, key) : Eigen::VectorXd::Zero(cfg.grid.N);
  };
  cfg.initial.u0 = profile("u0");
  cfg.initial.v0 = profile("v0");
  cfg.initial.theta0 = profile("theta0");
  if (init.contains("eta0") && init.contains("thetaDot0"))
    throw ParseError("initial data may give eta0 or thetaDot0, not both");
  if (init.contains("eta0")) cfg.initial.eta0 = profile("eta0");
  if (init.contains("thetaDot0")) cfg.initial.thetaDot0 = profile("thetaDot0");

  const json src = j.value("sources", json::object());
  detail::reject_unknown_keys(src, {"f", "g", "r"}, "sources");
  cfg.sources = Sources{detail::optional_number(src, "f", 0.0), detail::optional_number(src, "g", 0.0),
                        detail::optional_number(src, "r", 0.0)};
  return cfg;
}

inline SimConfig load_sim_config(const std::filesystem::path &path) {
  return parse_sim_config(detail::read_json_file(path), path.parent_path());
}

inline void write_trace_csv(std::ostream &out, const std::vector<TraceRow> &trace) {
  out << "step,time,lyapunov,dissipation,max_u,max_theta,max_phi\n";
  out << std::setprecision(17);
  for (const auto &r : trace)
    out << r.step << ',' << r.time << ',' << r.lyapunov << ',' << r.dissipation << ',' << r.max_u << ','
        << r.max_theta << ',' << r.max_phi << '\n';
}

} // namespace thermopiezo
