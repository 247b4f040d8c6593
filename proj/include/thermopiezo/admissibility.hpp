#pragma once

// Definiteness certification for the uniqueness hypotheses.
//
// Two independent routes: closed-form inequality lists for isotropic
// materials, and numeric eigenvalues of assembled quadratic-form matrices for
// any material. cross_validate() pits one against the other.
//
// Matrix convention: f(x) = x^T M x over the independent components (no 1/2).

#include "thermopiezo/constitutive.hpp"
#include "thermopiezo/material.hpp"
#include "thermopiezo/tensor_core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace thermopiezo {

struct QuadFormMatrix {
  Eigen::MatrixXd matrix;
  std::string ordering;

  [[nodiscard]] double max_abs() const { return matrix.size() == 0 ? 0.0 : matrix.cwiseAbs().maxCoeff(); }
  [[nodiscard]] Eigen::VectorXd eigenvalues() const {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(matrix, Eigen::EigenvaluesOnly).eigenvalues();
  }
  [[nodiscard]] double min_eigenvalue() const { return matrix.size() == 0 ? 0.0 : eigenvalues().minCoeff(); }
};

/// Recovers M with f(x) = x^T M x by polarization on unit vectors. f must be
/// a pure quadratic; f(2 e_p) != 4 f(e_p) beyond 1e-10 is rejected.
template <typename Evaluator>
QuadFormMatrix assemble_quadform(std::size_t dim, Evaluator &&f, std::string ordering = {}) {
  std::vector<double> x(dim, 0.0);
  auto eval = [&](std::size_t p, double sp, std::size_t q, double sq) {
    std::fill(x.begin(), x.end(), 0.0);
    x[p] += sp;
    x[q] += sq;
    return static_cast<double>(f(std::span<const double>(x)));
  };

  std::vector<double> diag(dim);
  for (std::size_t p = 0; p < dim; ++p) {
    diag[p] = eval(p, 1.0, p, 0.0);
    const double twice = eval(p, 2.0, p, 0.0);
    if (std::abs(twice - 4.0 * diag[p]) > 1e-10 * std::max(1.0, std::abs(4.0 * diag[p])))
      throw InvalidInputError("evaluator is not a pure quadratic form (coordinate " + std::to_string(p) + ")");
  }

  QuadFormMatrix out{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)),
                     std::move(ordering)};
  for (std::size_t p = 0; p < dim; ++p) {
    out.matrix(p, p) = diag[p];
    for (std::size_t q = p + 1; q < dim; ++q) {
      const double v = 0.5 * (eval(p, 1.0, q, 1.0) - diag[p] - diag[q]);
      out.matrix(p, q) = v;
      out.matrix(q, p) = v;
    }
  }
  return out;
}

inline constexpr const char *kOrderKappa18 = "kappa18-paper-order";
inline constexpr const char *kOrderW = "W-order: e(6)+kappa18(18)";
inline constexpr const char *kOrderG = "G-order: E(3)+V(6)+z(1)";
inline constexpr const char *kOrderP = "P-order: xi(1)+eta(3)";

namespace detail {
inline Sym2 sym2_from(std::span<const double> x) {
  Sym2 s;
  std::copy_n(x.begin(), 6, s.v.begin());
  return s;
}
inline Kappa kappa_from18(std::span<const double> x) {
  Kappa18 k;
  std::copy_n(x.begin(), 18, k.v.begin());
  return unpack18(k);
}
} // namespace detail

inline QuadFormMatrix assemble_W_matrix(const AnisoMaterial &m) {
  return assemble_quadform(
      24,
      [&](std::span<const double> x) {
        return form_W(m, detail::sym2_from(x.first(6)), detail::kappa_from18(x.subspan(6, 18)));
      },
      kOrderW);
}

inline QuadFormMatrix assemble_G_matrix(const AnisoMaterial &m) {
  return assemble_quadform(
      10,
      [&](std::span<const double> x) {
        return form_G(m, Vec3{x[0], x[1], x[2]}, detail::sym2_from(x.subspan(3, 6)), x[9]);
      },
      kOrderG);
}

inline QuadFormMatrix assemble_P_matrix(const AnisoMaterial &m) {
  return assemble_quadform(
      4, [&](std::span<const double> x) { return form_P(m, x[0], Vec3{x[1], x[2], x[3]}); }, kOrderP);
}

/// W2 restricted to kappa, 18x18 in the block ordering; block-diagonal
/// diag(A5, A5, A5, A3) for isotropic materials.
inline QuadFormMatrix assemble_W2_matrix(const IsoMaterial &iso) {
  AnisoMaterial m;
  m.a22 = isotropic_a22(iso.gamma1, iso.gamma2, iso.gamma3, iso.gamma4, iso.gamma5);
  return assemble_quadform(
      18, [&](std::span<const double> x) { return form_W(m, Sym2{}, detail::kappa_from18(x)); }, kOrderKappa18);
}

/// Closed-form A3 spectrum: 2(g4 - g5) twice, 2(g4 + 2 g5) once. Sorted ascending.
inline std::array<double, 3> a3_eigenvalues(double g4, double g5) {
  std::array<double, 3> ev{2.0 * (g4 - g5), 2.0 * (g4 - g5), 2.0 * (g4 + 2.0 * g5)};
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// Non-symmetric 3x3 coupled block of the matrix similar to A5.
inline Eigen::Matrix3d a5_similar_block(const IsoMaterial &iso) {
  const double g1 = iso.gamma1, g2 = iso.gamma2, g3 = iso.gamma3, g4 = iso.gamma4, g5 = iso.gamma5;
  const double xi = 2.0 * (g1 + g2 + g5) + 0.5 * (g3 + 2.0 * g4);
  Eigen::Matrix3d s;
  s << g3 + g4, 0.5 * (2.0 * g1 + g3), 2.0 * (g1 + g5),
       2.0 * g1 + g3, xi, 2.0 * (g1 + 2.0 * g2),
       2.0 * (g1 + g5), g1 + 2.0 * g2, 2.0 * (2.0 * g2 + g4 + g5);
  return s;
}

/// xi_{1,2} = (3 g4 + 2 g5 +- sqrt((g4 + 2 g5)^2 + 16 g5^2)) / 2
inline std::array<double, 2> a5_decoupled_eigenvalues(double g4, double g5) {
  const double root = std::sqrt((g4 + 2.0 * g5) * (g4 + 2.0 * g5) + 16.0 * g5 * g5);
  return {0.5 * (3.0 * g4 + 2.0 * g5 + root), 0.5 * (3.0 * g4 + 2.0 * g5 - root)};
}

struct A5Comparison {
  std::array<double, 5> assembled{};
  std::array<double, 5> similar{};
  double max_abs_difference = 0.0;
  double scale = 0.0; ///< max |eigenvalue| over both sets

  [[nodiscard]] bool agrees(double rel_tol) const { return max_abs_difference <= rel_tol * std::max(scale, 1e-300); }
};

/// Compares the spectrum of the assembled A5 block with that of the similar
/// matrix. The coupled 3x3 block has off-diagonal pairs (s, 2s) and (2s, s);
/// the diagonal similarity diag(1, sqrt2, 1) makes it symmetric, so a
/// symmetric solver is used for it.
inline A5Comparison a5_eigen_check(const IsoMaterial &iso) {
  const auto w2 = assemble_W2_matrix(iso);
  const Eigen::MatrixXd a5 = w2.matrix.topLeftCorner(5, 5);
  const Eigen::VectorXd ev_a = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a5, Eigen::EigenvaluesOnly).eigenvalues();

  const Eigen::Matrix3d s = a5_similar_block(iso);
  Eigen::Matrix3d sym = s;
  const double r2 = std::sqrt(2.0);
  sym(0, 1) = sym(1, 0) = s(0, 1) * r2; // sqrt(s01 * s10)
  sym(1, 2) = sym(2, 1) = s(2, 1) * r2; // sqrt(s12 * s21)
  const Eigen::Vector3d ev_s = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(sym, Eigen::EigenvaluesOnly).eigenvalues();
  const auto xi12 = a5_decoupled_eigenvalues(iso.gamma4, iso.gamma5);

  A5Comparison out;
  for (int k = 0; k < 5; ++k) out.assembled[k] = ev_a[k];
  out.similar = {ev_s[0], ev_s[1], ev_s[2], xi12[0], xi12[1]};
  std::sort(out.assembled.begin(), out.assembled.end());
  std::sort(out.similar.begin(), out.similar.end());
  for (int k = 0; k < 5; ++k) {
    out.max_abs_difference = std::max(out.max_abs_difference, std::abs(out.assembled[k] - out.similar[k]));
    out.scale = std::max({out.scale, std::abs(out.assembled[k]), std::abs(out.similar[k])});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports

struct ConditionRecord {
  std::string name;       ///< human-readable inequality
  std::string group;      ///< base, W1, W2, W, G, P, theorem2
  double value = 0.0;     ///< signed margin: > 0 means satisfied with room
  bool strict = false;    ///< strict: value > tol * scale; otherwise value >= -tol * scale
  double scale = 1.0;
  bool pass = false;
};

struct AdmissibilityReport {
  std::vector<ConditionRecord> conditions;
  bool W_psd = false;
  bool G_pd = false;
  bool P_psd = false;
  bool theorem1_hypotheses = false;
  bool theorem2_hypotheses = false;
  std::vector<SymmetryRecord> symmetry; ///< populated by check_numeric

  [[nodiscard]] bool group_pass(const std::string &group) const {
    return std::all_of(conditions.begin(), conditions.end(),
                       [&](const auto &c) { return c.group != group || c.pass; });
  }
  [[nodiscard]] bool all_pass() const { return W_psd && G_pd && P_psd && theorem1_hypotheses && theorem2_hypotheses; }
  [[nodiscard]] const ConditionRecord *find(const std::string &name) const {
    for (const auto &c : conditions)
      if (c.name == name) return &c;
    return nullptr;
  }
};

namespace detail {
inline void add_condition(AdmissibilityReport &r, std::string name, std::string group, double value, bool strict,
                          double tol, double scale = 1.0) {
  ConditionRecord c{std::move(name), std::move(group), value, strict, scale, false};
  c.pass = strict ? (value > tol * scale) : (value >= -tol * scale);
  r.conditions.push_back(std::move(c));
}

inline void add_base_conditions(AdmissibilityReport &r, double rho, double T0, double beta, double tol) {
  add_condition(r, "rho > 0", "base", rho, true, tol);
  add_condition(r, "T0 > 0", "base", T0, true, tol);
  add_condition(r, "beta > 0", "base", beta, true, tol);
}

inline double safe_div(double num, double den) {
  return den == 0.0 ? std::numeric_limits<double>::quiet_NaN() : num / den;
}
} // namespace detail

/// Closed-form definiteness conditions of an isotropic centrosymmetric
/// material. The E block of G is -alpha33/2 |E|^2, so G > 0 needs alpha33 < 0.
inline AdmissibilityReport check_isotropic(const IsoMaterial &m, double tol = 1e-10) {
  using detail::add_condition;
  AdmissibilityReport r;
  detail::add_base_conditions(r, m.rho, m.T0, m.beta, tol);

  add_condition(r, "mu >= 0", "W1", m.mu, false, tol);
  add_condition(r, "3 lambda + 2 mu >= 0", "W1", 3.0 * m.lambda + 2.0 * m.mu, false, tol);

  const double g1 = m.gamma1, g2 = m.gamma2, g3 = m.gamma3, g4 = m.gamma4, g5 = m.gamma5;
  auto sq = [](double x) { return x * x; };
  add_condition(r, "g3 + g4 >= 0", "W2", g3 + g4, false, tol);
  add_condition(r, "g4 - g5 >= 0", "W2", g4 - g5, false, tol);
  add_condition(r, "g4 + 2 g5 >= 0", "W2", g4 + 2.0 * g5, false, tol);
  add_condition(r, "2 g2 + g4 + g5 >= 0", "W2", 2.0 * g2 + g4 + g5, false, tol);
  add_condition(r, "4 (g1 + g2 + g5) + g3 + 2 g4 >= 0", "W2", 4.0 * (g1 + g2 + g5) + g3 + 2.0 * g4, false, tol);
  add_condition(r, "(g3 + g4)(4 g2 + 3 g4 + 4 g5) >= (2 g1 - g4)^2", "W2",
                (g3 + g4) * (4.0 * g2 + 3.0 * g4 + 4.0 * g5) - sq(2.0 * g1 - g4), false, tol);
  add_condition(r, "(g3 + g4)(2 g2 + g4 + g5) >= 2 (g1 + g5)^2", "W2",
                (g3 + g4) * (2.0 * g2 + g4 + g5) - 2.0 * sq(g1 + g5), false, tol);
  add_condition(r, "(2 g2 + g4 + g5)(g3 + 4 g4 + 6 g5) >= 2 (g1 - g4 - g5)^2", "W2",
                (2.0 * g2 + g4 + g5) * (g3 + 4.0 * g4 + 6.0 * g5) - 2.0 * sq(g1 - g4 - g5), false, tol);
  add_condition(r, "(g4 + 2 g5)[(5 g3 + 4 g4 - 2 g5)(10 g2 + 3 g4 + g5) - 2 (5 g1 - g4 + 3 g5)^2] >= 0", "W2",
                (g4 + 2.0 * g5) *
                    ((5.0 * g3 + 4.0 * g4 - 2.0 * g5) * (10.0 * g2 + 3.0 * g4 + g5) - 2.0 * sq(5.0 * g1 - g4 + 3.0 * g5)),
                false, tol);

  const double thermal = m.a44 + detail::safe_div(m.gamma, m.beta * m.beta);
  const double bulkTilde = 3.0 * m.lambdaTilde + 2.0 * m.muTilde;
  add_condition(r, "muTilde < 0", "G", -m.muTilde, true, tol);
  add_condition(r, "3 lambdaTilde + 2 muTilde < 0", "G", -bulkTilde, true, tol);
  add_condition(r, "alpha33 < 0", "G", -m.alpha33, true, tol);
  add_condition(r, "a44 + gamma / beta^2 < 0", "G", -thermal, true, tol);
  add_condition(r, "(3 lambdaTilde + 2 muTilde)(a44 + gamma / beta^2) > 3 alpha47^2", "G",
                bulkTilde * thermal - 3.0 * sq(m.alpha47), true, tol);

  add_condition(r, "gamma / beta >= 0", "P", detail::safe_div(m.gamma, m.beta), false, tol);
  add_condition(r, "alpha66 / beta >= 0", "P", detail::safe_div(m.alpha66, m.beta), false, tol);

  add_condition(r, "gamma >= 0", "theorem2", m.gamma, false, tol);
  add_condition(r, "alpha66 >= 0", "theorem2", m.alpha66, false, tol);

  const bool base = r.group_pass("base");
  r.W_psd = r.group_pass("W1") && r.group_pass("W2");
  r.G_pd = r.group_pass("G");
  r.P_psd = r.group_pass("P");
  r.theorem1_hypotheses = base && r.W_psd && r.G_pd;
  r.theorem2_hypotheses = r.theorem1_hypotheses && r.group_pass("theorem2");
  return r;
}

/// Numeric definiteness of W (24 variables), G (10) and P (4) from their
/// assembled matrices. Tolerances scale with the largest matrix entry.
inline AdmissibilityReport check_numeric(const AnisoMaterial &m, double tol = 1e-10, double sym_tol = 1e-10) {
  const auto sym = validate_symmetries(m, sym_tol);
  if (!sym.pass()) {
    const auto *w = sym.worst_failure();
    throw SymmetryViolationError("material violates " + w->relation, {-1, -1, -1}, w->max_violation);
  }

  AdmissibilityReport r;
  r.symmetry = sym.records;
  detail::add_base_conditions(r, m.rho, m.T0, m.beta, tol);

  const auto W = assemble_W_matrix(m);
  detail::add_condition(r, "W min eigenvalue >= 0", "W", W.min_eigenvalue(), false, tol, W.max_abs());
  if (m.beta != 0.0) {
    const auto G = assemble_G_matrix(m);
    const auto P = assemble_P_matrix(m);
    detail::add_condition(r, "G min eigenvalue > 0", "G", G.min_eigenvalue(), true, tol, G.max_abs());
    detail::add_condition(r, "P min eigenvalue >= 0", "P", P.min_eigenvalue(), false, tol, P.max_abs());
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    detail::add_condition(r, "G min eigenvalue > 0", "G", nan, true, tol);
    detail::add_condition(r, "P min eigenvalue >= 0", "P", nan, false, tol);
  }

  const bool base = r.group_pass("base");
  r.W_psd = r.group_pass("W");
  r.G_pd = r.group_pass("G");
  r.P_psd = r.group_pass("P");
  r.theorem1_hypotheses = base && r.W_psd && r.G_pd;
  // The isotropic list adds gamma >= 0, alpha66 >= 0, i.e. P psd once beta > 0.
  r.theorem2_hypotheses = r.theorem1_hypotheses && r.P_psd;
  return r;
}

// ---------------------------------------------------------------------------
// Cross-validation of the closed-form lists against the eigenvalue route

struct Disagreement {
  std::size_t sample = 0;
  std::string form; ///< "W", "W2", "G" or "P"
  IsoMaterial material;
  bool closed_form = false;
  bool numeric = false;
  double min_eigenvalue = 0.0;
  double matrix_scale = 0.0;
};

struct FormAgreement {
  std::size_t tested = 0;
  std::size_t agreed = 0;
  std::size_t boundary = 0;
  std::size_t numeric_pass = 0;

  [[nodiscard]] double fraction() const { return tested == 0 ? 1.0 : static_cast<double>(agreed) / tested; }
};

struct AgreementReport {
  std::size_t samples = 0;
  double range = 0.0;
  std::uint64_t seed = 0;
  double boundary_band = 1e-6;
  FormAgreement W, W2, G, P; ///< W2: the gradient block alone against its inequality list
  std::vector<Disagreement> disagreements;

  [[nodiscard]] bool all_agree() const { return disagreements.empty(); }
  [[nodiscard]] std::size_t tested() const { return W.tested + W2.tested + G.tested + P.tested; }
  [[nodiscard]] double fraction() const {
    const auto t = tested();
    return t == 0 ? 1.0 : static_cast<double>(W.agreed + W2.agreed + G.agreed + P.agreed) / t;
  }
};

/// Random isotropic material: every scalar uniform in [-range, range];
/// rho, T0 and beta uniform in (0, range].
inline IsoMaterial random_isotropic(std::mt19937_64 &rng, double range) {
  std::uniform_real_distribution<double> dist(-range, range);
  IsoMaterial m;
  IsoMaterial::for_each_field(m, [&](const char *, double &v) { v = dist(rng); });
  for (double *p : {&m.rho, &m.T0, &m.beta}) {
    *p = std::abs(*p);
    if (*p == 0.0) *p = range;
  }
  return m;
}

inline AgreementReport cross_validate(std::size_t samples, double range, std::uint64_t seed, double tol = 1e-10,
                                      double band = 1e-6) {
  AgreementReport rep;
  rep.samples = samples;
  rep.range = range;
  rep.seed = seed;
  rep.boundary_band = band;
  std::mt19937_64 rng(seed);

  for (std::size_t n = 0; n < samples; ++n) {
    const IsoMaterial iso = random_isotropic(rng, range);
    const auto closed = check_isotropic(iso, tol);
    const auto aniso = expand_isotropic(iso);

    auto compare = [&](const char *form, FormAgreement &acc, const QuadFormMatrix &M, bool closed_verdict,
                       bool strict) {
      const double scale = M.max_abs();
      const double lo = M.min_eigenvalue();
      if (std::abs(lo) < band * scale || scale == 0.0) {
        ++acc.boundary;
        return;
      }
      const bool numeric = strict ? lo > tol * scale : lo >= -tol * scale;
      ++acc.tested;
      acc.numeric_pass += numeric ? 1 : 0;
      if (numeric == closed_verdict) {
        ++acc.agreed;
      } else {
        rep.disagreements.push_back({n, form, iso, closed_verdict, numeric, lo, scale});
      }
    };
    compare("W", rep.W, assemble_W_matrix(aniso), closed.W_psd, false);
    compare("W2", rep.W2, assemble_W2_matrix(iso), closed.group_pass("W2"), false);
    compare("G", rep.G, assemble_G_matrix(aniso), closed.G_pd, true);
    compare("P", rep.P, assemble_P_matrix(aniso), closed.P_psd, false);
  }
  return rep;
}

} // namespace thermopiezo
