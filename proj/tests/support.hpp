#pragma once

// Helpers shared by the unit and acceptance tests. Nothing here calls into
// the code under test except for plain data types.

#include "thermopiezo/material.hpp"
#include "thermopiezo/tensor_core.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <random>
#include <set>
#include <vector>

namespace tp_test {

using namespace thermopiezo;

/// Uniformly distributed proper rotation from a normalised Gaussian quaternion.
inline Eigen::Matrix3d random_rotation(std::mt19937_64 &rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

/// T'_{i1..iR} = Q_{i1 a1} ... Q_{iR aR} T_{a1..aR}, one mode at a time.
template <std::size_t R>
FullTensor<R> rotate(const FullTensor<R> &t, const Eigen::Matrix3d &Q) {
  FullTensor<R> cur = t;
  for (std::size_t mode = 0; mode < R; ++mode) {
    FullTensor<R> next;
    for (std::size_t off = 0; off < FullTensor<R>::size; ++off) {
      auto idx = FullTensor<R>::indices(off);
      double s = 0.0;
      for (int a = 0; a < 3; ++a) {
        auto src = idx;
        src[mode] = a;
        std::size_t so = 0;
        for (std::size_t p = 0; p < R; ++p) so = 3 * so + static_cast<std::size_t>(src[p]);
        s += Q(idx[mode], a) * cur.data[so];
      }
      next.data[off] = s;
    }
    cur = next;
  }
  return cur;
}

/// Average of t over the permutation group generated by gens (slot p of the
/// image reads slot perm[p] of the source).
template <std::size_t R>
FullTensor<R> symmetrize(const FullTensor<R> &t, const std::vector<std::array<int, R>> &gens) {
  std::array<int, R> id{};
  for (std::size_t p = 0; p < R; ++p) id[p] = static_cast<int>(p);
  std::set<std::array<int, R>> group{id};
  std::vector<std::array<int, R>> frontier{id};
  while (!frontier.empty()) {
    std::vector<std::array<int, R>> next;
    for (const auto &g : frontier)
      for (const auto &h : gens) {
        std::array<int, R> c{};
        for (std::size_t p = 0; p < R; ++p) c[p] = g[h[p]];
        if (group.insert(c).second) next.push_back(c);
      }
    frontier = std::move(next);
  }
  FullTensor<R> out;
  for (const auto &perm : group)
    for (std::size_t off = 0; off < FullTensor<R>::size; ++off) {
      const auto idx = FullTensor<R>::indices(off);
      std::size_t po = 0;
      for (std::size_t p = 0; p < R; ++p) po = 3 * po + static_cast<std::size_t>(idx[perm[p]]);
      out.data[off] += t.data[po];
    }
  out *= 1.0 / static_cast<double>(group.size());
  return out;
}

template <std::size_t R>
FullTensor<R> random_tensor(std::mt19937_64 &rng, double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  FullTensor<R> t;
  for (double &v : t.data) v = d(rng);
  return t;
}

/// Fully populated anisotropic material carrying every required index symmetry.
inline AnisoMaterial random_aniso(std::mt19937_64 &rng, double scale = 1.0) {
  using P2 = std::array<int, 2>;
  using P3 = std::array<int, 3>;
  using P4 = std::array<int, 4>;
  using P5 = std::array<int, 5>;
  using P6 = std::array<int, 6>;
  std::uniform_real_distribution<double> d(-scale, scale);
  AnisoMaterial m;
  m.rho = 1.0 + std::abs(d(rng));
  m.T0 = 1.0 + std::abs(d(rng));
  m.beta = 0.5 + std::abs(d(rng));
  m.alpha4 = d(rng);
  m.gamma = d(rng);
  m.a44 = d(rng);
  m.a11 = symmetrize(random_tensor<4>(rng, scale), {P4{1, 0, 2, 3}, P4{2, 3, 0, 1}});
  m.a12 = symmetrize(random_tensor<5>(rng, scale), {P5{1, 0, 2, 3, 4}, P5{0, 1, 3, 2, 4}});
  m.a13 = symmetrize(random_tensor<3>(rng, scale), {P3{1, 0, 2}});
  m.a14 = symmetrize(random_tensor<2>(rng, scale), {P2{1, 0}});
  m.a17 = symmetrize(random_tensor<4>(rng, scale), {P4{1, 0, 2, 3}, P4{2, 3, 0, 1}});
  m.a22 = symmetrize(random_tensor<6>(rng, scale), {P6{1, 0, 2, 3, 4, 5}, P6{3, 4, 5, 0, 1, 2}});
  m.a23 = symmetrize(random_tensor<4>(rng, scale), {P4{1, 0, 2, 3}});
  m.a24 = symmetrize(random_tensor<3>(rng, scale), {P3{1, 0, 2}});
  m.a27 = symmetrize(random_tensor<5>(rng, scale), {P5{1, 0, 2, 3, 4}, P5{0, 1, 2, 4, 3}});
  m.a33 = symmetrize(random_tensor<2>(rng, scale), {P2{1, 0}});
  m.a34 = random_tensor<1>(rng, scale);
  m.a37 = symmetrize(random_tensor<3>(rng, scale), {P3{0, 2, 1}});
  m.a47 = symmetrize(random_tensor<2>(rng, scale), {P2{1, 0}});
  m.a56 = random_tensor<1>(rng, scale);
  m.a66 = symmetrize(random_tensor<2>(rng, scale), {P2{1, 0}});
  m.a77 = symmetrize(random_tensor<4>(rng, scale), {P4{1, 0, 2, 3}, P4{2, 3, 0, 1}});
  return m;
}

inline IsoMaterial random_iso(std::mt19937_64 &rng, double range = 2.0) {
  std::uniform_real_distribution<double> d(-range, range);
  IsoMaterial m;
  IsoMaterial::for_each_field(m, [&](const char *, double &v) { v = d(rng); });
  m.rho = std::abs(m.rho) + 0.1;
  m.T0 = std::abs(m.T0) + 0.1;
  m.beta = std::abs(m.beta) + 0.1;
  return m;
}

inline Sym2 random_sym2(std::mt19937_64 &rng, double s = 1.0) {
  std::uniform_real_distribution<double> d(-s, s);
  Sym2 x;
  for (double &v : x.v) v = d(rng);
  return x;
}

inline Kappa random_kappa(std::mt19937_64 &rng, double s = 1.0) {
  std::uniform_real_distribution<double> d(-s, s);
  Kappa x;
  for (double &v : x.v) v = d(rng);
  return x;
}

inline Vec3 random_vec3(std::mt19937_64 &rng, double s = 1.0) {
  std::uniform_real_distribution<double> d(-s, s);
  return {d(rng), d(rng), d(rng)};
}

/// Independent evaluation of a polynomial p(t) = sum c_k t^k and its derivatives.
struct Poly {
  std::vector<double> c;
  [[nodiscard]] double operator()(double t) const {
    double s = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) s = s * t + c[k];
    return s;
  }
  [[nodiscard]] Poly derivative() const {
    Poly d;
    for (std::size_t k = 1; k < c.size(); ++k) d.c.push_back(static_cast<double>(k) * c[k]);
    if (d.c.empty()) d.c.push_back(0.0);
    return d;
  }
};

inline Poly random_poly(std::mt19937_64 &rng, int degree) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Poly p;
  for (int k = 0; k <= degree; ++k) p.c.push_back(d(rng));
  return p;
}

} // namespace tp_test
