#pragma once

#include "thermopiezo/tensor_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace thermopiezo {

/// Coefficients of the reduced linear theory, full index ranges.
///
/// gamma is the single combination a55 - beta^2 a44 - alpha4 b55; a55 and
/// b55 never enter the reduced equations separately.
struct AnisoMaterial {
  double rho = 1.0;
  double T0 = 1.0;
  double beta = 1.0;
  double alpha4 = 0.0;
  double gamma = 0.0;

  FullTensor<4> a11;
  FullTensor<5> a12;
  FullTensor<3> a13;
  FullTensor<2> a14;
  FullTensor<4> a17;
  FullTensor<6> a22;
  FullTensor<4> a23;
  FullTensor<3> a24;
  FullTensor<5> a27;
  FullTensor<2> a33;
  FullTensor<1> a34;
  FullTensor<3> a37;
  double a44 = 0.0;
  FullTensor<2> a47;
  FullTensor<1> a56;
  FullTensor<2> a66;
  FullTensor<4> a77;

  /// Applies fn(name, tensor) to every coefficient tensor, in file order.
  template <typename Self, typename Fn>
  static void for_each_tensor(Self &self, Fn &&fn) {
    fn("a11", self.a11); fn("a12", self.a12); fn("a13", self.a13); fn("a14", self.a14);
    fn("a17", self.a17); fn("a22", self.a22); fn("a23", self.a23); fn("a24", self.a24);
    fn("a27", self.a27); fn("a33", self.a33); fn("a34", self.a34); fn("a37", self.a37);
    fn("a47", self.a47); fn("a56", self.a56); fn("a66", self.a66); fn("a77", self.a77);
  }
};

/// Isotropic material with a centre of symmetry: 19 scalars plus base constants.
struct IsoMaterial {
  double rho = 1.0;
  double T0 = 1.0;
  double beta = 1.0;
  double alpha4 = 0.0;
  double gamma = 0.0;
  double lambda = 0.0, mu = 0.0;
  double gamma1 = 0.0, gamma2 = 0.0, gamma3 = 0.0, gamma4 = 0.0, gamma5 = 0.0;
  double lambdaStar = 0.0, muStar = 0.0;
  double alpha0 = 0.0, beta0 = 0.0;
  double lambdaTilde = 0.0, muTilde = 0.0;
  double alpha14 = 0.0, alpha33 = 0.0, alpha47 = 0.0, alpha66 = 0.0;
  double a44 = 0.0;

  /// Named access to every scalar, in file order.
  template <typename Self, typename Fn>
  static void for_each_field(Self &self, Fn &&fn) {
    fn("rho", self.rho); fn("T0", self.T0); fn("beta", self.beta);
    fn("alpha4", self.alpha4); fn("gamma", self.gamma);
    fn("lambda", self.lambda); fn("mu", self.mu);
    fn("gamma1", self.gamma1); fn("gamma2", self.gamma2); fn("gamma3", self.gamma3);
    fn("gamma4", self.gamma4); fn("gamma5", self.gamma5);
    fn("lambdaStar", self.lambdaStar); fn("muStar", self.muStar);
    fn("alpha0", self.alpha0); fn("beta0", self.beta0);
    fn("lambdaTilde", self.lambdaTilde); fn("muTilde", self.muTilde);
    fn("alpha14", self.alpha14); fn("alpha33", self.alpha33);
    fn("alpha47", self.alpha47); fn("alpha66", self.alpha66); fn("a44", self.a44);
  }

  friend bool operator==(const IsoMaterial &, const IsoMaterial &) = default;
};

struct SymmetryRecord {
  std::string relation;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

struct SymmetryReport {
  std::vector<SymmetryRecord> records;

  [[nodiscard]] bool pass() const {
    return std::all_of(records.begin(), records.end(), [](const auto &r) { return r.pass; });
  }
  [[nodiscard]] const SymmetryRecord *worst_failure() const {
    const SymmetryRecord *w = nullptr;
    for (const auto &r : records)
      if (!r.pass && (w == nullptr || r.max_violation > w->max_violation)) w = &r;
    return w;
  }
};

namespace detail {

/// max |T(i) - T(i permuted)| where the permuted tensor reads index slot
/// perm[p] into position p.
template <std::size_t R>
double permutation_violation(const FullTensor<R> &t, const std::array<int, R> &perm) {
  double worst = 0.0;
  for (std::size_t off = 0; off < FullTensor<R>::size; ++off) {
    const auto idx = FullTensor<R>::indices(off);
    std::size_t poff = 0;
    for (std::size_t p = 0; p < R; ++p) poff = 3 * poff + static_cast<std::size_t>(idx[perm[p]]);
    worst = std::max(worst, std::abs(t.data[off] - t.data[poff]));
  }
  return worst;
}

} // namespace detail

/// Checks every symmetry relation of the reduced coefficient set. The
/// tolerance for each relation is rel_tol * max|component| of that tensor.
inline SymmetryReport validate_symmetries(const AnisoMaterial &m, double rel_tol = 1e-10) {
  SymmetryReport report;
  auto add = [&](const std::string &name, const auto &t, const auto &perm) {
    SymmetryRecord r;
    r.relation = name;
    r.max_violation = detail::permutation_violation(t, perm);
    r.tolerance = rel_tol * t.max_abs();
    r.pass = r.max_violation <= r.tolerance;
    report.records.push_back(r);
  };
  using P2 = std::array<int, 2>;
  using P3 = std::array<int, 3>;
  using P4 = std::array<int, 4>;
  using P5 = std::array<int, 5>;
  using P6 = std::array<int, 6>;

  add("a11 first-pair symmetry", m.a11, P4{1, 0, 2, 3});
  add("a11 major symmetry", m.a11, P4{2, 3, 0, 1});
  add("a12 first-pair symmetry", m.a12, P5{1, 0, 2, 3, 4});
  add("a12 second-pair symmetry", m.a12, P5{0, 1, 3, 2, 4});
  add("a13 first-pair symmetry", m.a13, P3{1, 0, 2});
  add("a14 symmetry", m.a14, P2{1, 0});
  add("a17 first-pair symmetry", m.a17, P4{1, 0, 2, 3});
  add("a17 major symmetry", m.a17, P4{2, 3, 0, 1});
  add("a22 first-pair symmetry", m.a22, P6{1, 0, 2, 3, 4, 5});
  add("a22 major symmetry", m.a22, P6{3, 4, 5, 0, 1, 2});
  add("a23 first-pair symmetry", m.a23, P4{1, 0, 2, 3});
  add("a24 first-pair symmetry", m.a24, P3{1, 0, 2});
  add("a27 first-pair symmetry", m.a27, P5{1, 0, 2, 3, 4});
  add("a27 last-pair symmetry", m.a27, P5{0, 1, 2, 4, 3});
  add("a33 symmetry", m.a33, P2{1, 0});
  add("a37 last-pair symmetry", m.a37, P3{0, 2, 1});
  add("a47 symmetry", m.a47, P2{1, 0});
  add("a66 symmetry", m.a66, P2{1, 0});
  add("a77 first-pair symmetry", m.a77, P4{1, 0, 2, 3});
  add("a77 major symmetry", m.a77, P4{2, 3, 0, 1});
  return report;
}

namespace detail {
constexpr double delta(int a, int b) { return a == b ? 1.0 : 0.0; }

/// c1 d_ij d_kl + c2 (d_ik d_jl + d_il d_jk)
inline FullTensor<4> lame_tensor(double c1, double c2) {
  FullTensor<4> t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          t(i, j, k, l) = c1 * delta(i, j) * delta(k, l) +
                          c2 * (delta(i, k) * delta(j, l) + delta(i, l) * delta(j, k));
  return t;
}

inline FullTensor<2> scaled_identity(double c) {
  FullTensor<2> t;
  for (int i = 0; i < 3; ++i) t(i, i) = c;
  return t;
}
} // namespace detail

/// Isotropic centrosymmetric a22_{ijkmnr} from the five gamma moduli.
inline FullTensor<6> isotropic_a22(double g1, double g2, double g3, double g4, double g5) {
  using detail::delta;
  FullTensor<6> t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int m = 0; m < 3; ++m)
          for (int n = 0; n < 3; ++n)
            for (int r = 0; r < 3; ++r) {
              const double t1 = delta(i, j) * delta(k, m) * delta(n, r) + delta(i, j) * delta(k, n) * delta(m, r) +
                                delta(i, k) * delta(j, r) * delta(m, n) + delta(i, r) * delta(j, k) * delta(m, n);
              const double t2 = delta(i, k) * delta(j, m) * delta(n, r) + delta(i, k) * delta(j, n) * delta(m, r) +
                                delta(i, m) * delta(j, k) * delta(n, r) + delta(i, n) * delta(j, k) * delta(m, r);
              const double t3 = delta(i, j) * delta(k, r) * delta(m, n);
              const double t4 = delta(i, m) * delta(j, n) * delta(k, r) + delta(i, n) * delta(j, m) * delta(k, r);
              const double t5 = delta(i, m) * delta(j, r) * delta(k, n) + delta(i, n) * delta(j, r) * delta(k, m) +
                                delta(i, r) * delta(j, m) * delta(k, n) + delta(i, r) * delta(j, n) * delta(k, m);
              t(i, j, k, m, n, r) = g1 * t1 + g2 * t2 + g3 * t3 + g4 * t4 + g5 * t5;
            }
  return t;
}

/// Full coefficient tensors of an isotropic centrosymmetric material. The
/// odd-rank couplings (a12, a13, a24, a27, a34, a37, a56) vanish.
inline AnisoMaterial expand_isotropic(const IsoMaterial &iso) {
  AnisoMaterial m;
  m.rho = iso.rho;
  m.T0 = iso.T0;
  m.beta = iso.beta;
  m.alpha4 = iso.alpha4;
  m.gamma = iso.gamma;
  m.a44 = iso.a44;
  m.a11 = detail::lame_tensor(iso.lambda, iso.mu);
  m.a17 = detail::lame_tensor(iso.lambdaStar, iso.muStar);
  m.a23 = detail::lame_tensor(iso.alpha0, iso.beta0);
  m.a77 = detail::lame_tensor(iso.lambdaTilde, iso.muTilde);
  m.a22 = isotropic_a22(iso.gamma1, iso.gamma2, iso.gamma3, iso.gamma4, iso.gamma5);
  m.a14 = detail::scaled_identity(iso.alpha14);
  m.a33 = detail::scaled_identity(iso.alpha33);
  m.a47 = detail::scaled_identity(iso.alpha47);
  m.a66 = detail::scaled_identity(iso.alpha66);
  return m;
}

/// Admissible reference material used by tests and samples/default_material.json.
inline IsoMaterial default_fixture() {
  IsoMaterial m;
  m.rho = 1.0;
  m.T0 = 1.0;
  m.beta = 1.0;
  m.lambda = 1.0;
  m.mu = 1.0;
  m.gamma3 = 1.0;
  m.gamma4 = 1.0;
  m.lambdaStar = m.muStar = m.alpha0 = m.beta0 = 0.1;
  m.lambdaTilde = -1.0;
  m.muTilde = -0.5;
  m.alpha33 = -1.0;
  m.alpha47 = 0.1;
  m.a44 = -2.0;
  m.gamma = 1.0;
  m.alpha14 = 0.2;
  m.alpha66 = 1.0;
  return m;
}

} // namespace thermopiezo
