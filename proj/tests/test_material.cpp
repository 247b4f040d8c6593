#include "support.hpp"

#include "thermopiezo/material.hpp"

#include <gtest/gtest.h>

#include <map>
#include <string>

using namespace thermopiezo;

namespace {

// Independent evaluation of the isotropic a22 formula: each gamma term is a
// list of delta pairings written as index-slot strings over (i j k m n r).
double delta_pairings(const std::vector<std::string> &terms, const std::array<int, 6> &idx) {
  const std::string names = "ijkmnr";
  double sum = 0.0;
  for (const auto &t : terms) { // e.g. "ij km nr"
    double prod = 1.0;
    for (std::size_t p = 0; p + 1 < t.size(); p += 3) {
      const int a = idx[names.find(t[p])];
      const int b = idx[names.find(t[p + 1])];
      prod *= (a == b) ? 1.0 : 0.0;
    }
    sum += prod;
  }
  return sum;
}

double a22_oracle(const std::array<double, 5> &g, const std::array<int, 6> &idx) {
  static const std::vector<std::vector<std::string>> terms{
      {"ij km nr", "ij kn mr", "ik jr mn", "ir jk mn"},
      {"ik jm nr", "ik jn mr", "im jk nr", "in jk mr"},
      {"ij kr mn"},
      {"im jn kr", "in jm kr"},
      {"im jr kn", "in jr km", "ir jm kn", "ir jn km"},
  };
  double s = 0.0;
  for (int a = 0; a < 5; ++a) s += g[a] * delta_pairings(terms[a], idx);
  return s;
}

} // namespace

TEST(ExpandIsotropic, ZeroScalarsGiveZeroTensors) {
  IsoMaterial iso; // all moduli 0, rho/T0/beta positive
  const auto m = expand_isotropic(iso);
  AnisoMaterial::for_each_tensor(m, [](const char *name, const auto &t) { EXPECT_EQ(t.max_abs(), 0.0) << name; });
  EXPECT_EQ(m.rho, 1.0);
}

TEST(ExpandIsotropic, LameEntries) {
  IsoMaterial iso;
  iso.lambda = 2.0;
  iso.mu = 3.0;
  const auto m = expand_isotropic(iso);
  EXPECT_EQ(m.a11(0, 0, 0, 0), 8.0);
  EXPECT_EQ(m.a11(0, 0, 1, 1), 2.0);
  EXPECT_EQ(m.a11(0, 1, 0, 1), 3.0);
}

TEST(ExpandIsotropic, Gamma5HandValue) {
  IsoMaterial iso;
  iso.gamma5 = 1.0;
  const auto m = expand_isotropic(iso);
  EXPECT_EQ(m.a22(0, 1, 2, 1, 2, 0), 1.0); // a22_{123231}
}

TEST(ExpandIsotropic, A22MatchesPairingOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    std::uniform_real_distribution<double> d(-2, 2);
    const std::array<double, 5> g{d(rng), d(rng), d(rng), d(rng), d(rng)};
    const auto t = isotropic_a22(g[0], g[1], g[2], g[3], g[4]);
    for (std::size_t off = 0; off < t.size; ++off) {
      const auto idx = FullTensor<6>::indices(off);
      ASSERT_NEAR(t.data[off], a22_oracle(g, idx), 1e-14) << off;
    }
  }
}

TEST(ExpandIsotropic, SymmetriesHoldExactly) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rep = validate_symmetries(expand_isotropic(tp_test::random_iso(rng)));
    ASSERT_TRUE(rep.pass());
    for (const auto &r : rep.records) EXPECT_EQ(r.max_violation, 0.0) << r.relation;
  }
}

TEST(ExpandIsotropic, LinearInScalars) {
  std::mt19937_64 rng(8);
  IsoMaterial a = tp_test::random_iso(rng), b = tp_test::random_iso(rng);
  b.rho = a.rho;
  b.T0 = a.T0;
  b.beta = a.beta;
  IsoMaterial sum = a;
  std::vector<double> bv;
  IsoMaterial::for_each_field(b, [&](const char *, double &v) { bv.push_back(v); });
  std::size_t k = 0;
  IsoMaterial::for_each_field(sum, [&](const char *name, double &v) {
    const std::string n = name;
    if (n != "rho" && n != "T0" && n != "beta") v += bv[k];
    ++k;
  });
  const auto ea = expand_isotropic(a), eb = expand_isotropic(b), es = expand_isotropic(sum);
  auto check = [](const auto &x, const auto &y, const auto &s) {
    for (std::size_t q = 0; q < s.data.size(); ++q) ASSERT_NEAR(s.data[q], x.data[q] + y.data[q], 1e-13);
  };
  check(ea.a11, eb.a11, es.a11);
  check(ea.a22, eb.a22, es.a22);
  check(ea.a17, eb.a17, es.a17);
  check(ea.a23, eb.a23, es.a23);
  check(ea.a77, eb.a77, es.a77);
  check(ea.a47, eb.a47, es.a47);
}

TEST(ExpandIsotropic, A22InvariantUnderAxisPermutations) {
  std::mt19937_64 rng(12);
  const auto iso = tp_test::random_iso(rng);
  const auto t = expand_isotropic(iso).a22;
  const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (const auto &p : perms) {
    Eigen::Matrix3d Q = Eigen::Matrix3d::Zero();
    for (int i = 0; i < 3; ++i) Q(i, p[i]) = 1.0;
    const auto r = tp_test::rotate(t, Q);
    for (std::size_t off = 0; off < t.size; ++off) ASSERT_NEAR(r.data[off], t.data[off], 1e-14);
  }
}

TEST(Symmetries, AsymmetricA11IsFlagged) {
  AnisoMaterial m = expand_isotropic(tp_test::random_iso(*std::make_unique<std::mt19937_64>(2)));
  m.a11(0, 1, 2, 2) += 0.5;
  const auto rep = validate_symmetries(m);
  EXPECT_FALSE(rep.pass());
  ASSERT_NE(rep.worst_failure(), nullptr);
  EXPECT_EQ(rep.worst_failure()->relation.rfind("a11", 0), 0u);
}

TEST(Symmetries, RandomSymmetrizedMaterialPasses) {
  std::mt19937_64 rng(13);
  EXPECT_TRUE(validate_symmetries(tp_test::random_aniso(rng)).pass());
}

TEST(Symmetries, ToleranceIsRelative) {
  AnisoMaterial m;
  m.a33(0, 1) = 1e6;
  m.a33(1, 0) = 1e6 + 1e-5; // 1e-11 relative
  EXPECT_TRUE(validate_symmetries(m).pass());
  m.a33(1, 0) = 1e6 + 1.0; // 1e-6 relative
  EXPECT_FALSE(validate_symmetries(m).pass());
}

TEST(DefaultFixture, MatchesDocumentedValues) {
  const auto m = default_fixture();
  EXPECT_EQ(m.alpha33, -1.0);
  EXPECT_EQ(m.a44, -2.0);
  EXPECT_EQ(m.gamma3, 1.0);
  EXPECT_EQ(m.alpha4, 0.0);
}
