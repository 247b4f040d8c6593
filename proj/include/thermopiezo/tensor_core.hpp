#pragma once

// Index conventions and storage for the tensors of second-gradient
// thermopiezoelectricity. Indices are zero-based in code (0,1,2 <-> 1,2,3).
//
//   Sym2    symmetric rank-2, 6 slots, order (11, 22, 33, 23, 13, 12)
//   Kappa   rank-3 symmetric in its first two indices, 18 slots
//   Kappa18 flat 18-vector in the ordering used for the isotropic W2 matrix
//
// Contractions never use Voigt weights: forms expand to full index ranges.

#include "thermopiezo/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

namespace thermopiezo {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

constexpr std::size_t pow3(std::size_t rank) { return rank == 0 ? 1 : 3 * pow3(rank - 1); }

/// Dense rank-R tensor over full index ranges, row-major (last index fastest).
template <std::size_t Rank>
struct FullTensor {
  static constexpr std::size_t rank = Rank;
  static constexpr std::size_t size = pow3(Rank);

  std::array<double, size> data{};

  template <typename... I>
  static constexpr std::size_t offset(I... idx) {
    static_assert(sizeof...(I) == Rank, "wrong number of indices");
    std::size_t off = 0;
    ((off = 3 * off + static_cast<std::size_t>(idx)), ...);
    return off;
  }

  template <typename... I>
  constexpr double &operator()(I... idx) { return data[offset(idx...)]; }
  template <typename... I>
  constexpr double operator()(I... idx) const { return data[offset(idx...)]; }

  /// Unpacks a flat offset into its index tuple.
  static constexpr std::array<int, Rank> indices(std::size_t off) {
    std::array<int, Rank> idx{};
    for (std::size_t p = Rank; p-- > 0;) {
      idx[p] = static_cast<int>(off % 3);
      off /= 3;
    }
    return idx;
  }

  [[nodiscard]] double max_abs() const {
    double m = 0.0;
    for (double v : data) m = std::max(m, std::abs(v));
    return m;
  }

  FullTensor &operator+=(const FullTensor &o) {
    for (std::size_t k = 0; k < size; ++k) data[k] += o.data[k];
    return *this;
  }
  FullTensor &operator*=(double s) {
    for (double &v : data) v *= s;
    return *this;
  }
  friend FullTensor operator+(FullTensor a, const FullTensor &b) { return a += b; }
  friend FullTensor operator*(double s, FullTensor a) { return a *= s; }
  friend bool operator==(const FullTensor &, const FullTensor &) = default;
};

/// Slot of the symmetric pair (i,j) in the order (11, 22, 33, 23, 13, 12).
constexpr int sym_index(int i, int j) {
  if (i == j) return i;
  const int s = i + j; // 1 -> (0,1), 2 -> (0,2), 3 -> (1,2)
  return s == 3 ? 3 : (s == 2 ? 4 : 5);
}

/// Inverse of sym_index: canonical (i <= j) pair for each slot.
inline constexpr std::array<std::array<int, 2>, 6> kSymPairs{{{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}}};

struct Sym2 {
  std::array<double, 6> v{};

  constexpr double operator()(int i, int j) const { return v[sym_index(i, j)]; }
  constexpr double &at(int i, int j) { return v[sym_index(i, j)]; }

  static constexpr Sym2 identity() { return Sym2{{1.0, 1.0, 1.0, 0.0, 0.0, 0.0}}; }

  [[nodiscard]] double trace() const { return v[0] + v[1] + v[2]; }
  [[nodiscard]] FullTensor<2> full() const {
    FullTensor<2> t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t(i, j) = (*this)(i, j);
    return t;
  }

  Sym2 &operator+=(const Sym2 &o) {
    for (int k = 0; k < 6; ++k) v[k] += o.v[k];
    return *this;
  }
  Sym2 &operator*=(double s) {
    for (double &x : v) x *= s;
    return *this;
  }
  friend Sym2 operator+(Sym2 a, const Sym2 &b) { return a += b; }
  friend Sym2 operator-(Sym2 a, const Sym2 &b) { return a += (-1.0 * b); }
  friend Sym2 operator*(double s, Sym2 a) { return a *= s; }
  friend bool operator==(const Sym2 &, const Sym2 &) = default;
};

/// kappa_ijk = u_{k,ij}; symmetric in (i,j). Slot = 6*k + sym_index(i,j).
struct Kappa {
  std::array<double, 18> v{};

  static constexpr int slot(int i, int j, int k) { return 6 * k + sym_index(i, j); }

  constexpr double operator()(int i, int j, int k) const { return v[slot(i, j, k)]; }
  constexpr double &at(int i, int j, int k) { return v[slot(i, j, k)]; }

  [[nodiscard]] FullTensor<3> full() const {
    FullTensor<3> t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) t(i, j, k) = (*this)(i, j, k);
    return t;
  }

  Kappa &operator+=(const Kappa &o) {
    for (int k = 0; k < 18; ++k) v[k] += o.v[k];
    return *this;
  }
  Kappa &operator*=(double s) {
    for (double &x : v) x *= s;
    return *this;
  }
  friend Kappa operator+(Kappa a, const Kappa &b) { return a += b; }
  friend Kappa operator*(double s, Kappa a) { return a *= s; }
  friend bool operator==(const Kappa &, const Kappa &) = default;
};

/// Flat 18-vector in the isotropic block ordering
/// {k221, k331, k111, k122, k133, k332, k112, k222, k233,
///  k211, k113, k223, k333, k311, k322, k123, k231, k312}.
struct Kappa18 {
  std::array<double, 18> v{};
  friend bool operator==(const Kappa18 &, const Kappa18 &) = default;
};

/// One-based (i,j,k) labels of the Kappa18 slots.
inline constexpr std::array<std::array<int, 3>, 18> kKappa18Order{{
    {2, 2, 1}, {3, 3, 1}, {1, 1, 1}, {1, 2, 2}, {1, 3, 3},
    {3, 3, 2}, {1, 1, 2}, {2, 2, 2}, {2, 3, 3}, {2, 1, 1},
    {1, 1, 3}, {2, 2, 3}, {3, 3, 3}, {3, 1, 1}, {3, 2, 2},
    {1, 2, 3}, {2, 3, 1}, {3, 1, 2},
}};

inline Kappa18 pack18(const Kappa &kappa) {
  Kappa18 out;
  for (std::size_t p = 0; p < 18; ++p) {
    const auto &ijk = kKappa18Order[p];
    out.v[p] = kappa(ijk[0] - 1, ijk[1] - 1, ijk[2] - 1);
  }
  return out;
}

inline Kappa unpack18(const Kappa18 &packed) {
  Kappa out;
  for (std::size_t p = 0; p < 18; ++p) {
    const auto &ijk = kKappa18Order[p];
    out.at(ijk[0] - 1, ijk[1] - 1, ijk[2] - 1) = packed.v[p];
  }
  return out;
}

namespace detail {
inline void require_finite(double x, const char *what) {
  if (!std::isfinite(x)) throw InvalidInputError(std::string("non-finite component in ") + what);
}
} // namespace detail

/// e_ij = (u_{i,j} + u_{j,i}) / 2 from g(i,j) = u_{i,j}.
inline Sym2 strain_from_gradient(const Mat3 &g) {
  for (const auto &row : g)
    for (double x : row) detail::require_finite(x, "displacement gradient");
  Sym2 e;
  for (const auto &[i, j] : kSymPairs) e.at(i, j) = 0.5 * (g[i][j] + g[j][i]);
  return e;
}

struct KappaResult {
  Kappa kappa;
  double max_asymmetry = 0.0;
};

/// Builds kappa_ijk from h(i,j,k) = u_{k,ij}. The stored value is the
/// symmetric part in (i,j); asymmetry beyond sym_tol * max|h| is an error.
inline KappaResult kappa_from_second_gradient(const FullTensor<3> &h, double sym_tol = 1e-12) {
  for (double x : h.data) detail::require_finite(x, "second displacement gradient");
  KappaResult out;
  std::array<int, 3> worst{-1, -1, -1};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const double a = std::abs(h(i, j, k) - h(j, i, k));
        if (a > out.max_asymmetry) {
          out.max_asymmetry = a;
          worst = {i, j, k};
        }
      }
  if (out.max_asymmetry > sym_tol * h.max_abs()) {
    throw SymmetryViolationError("second gradient not symmetric in its first two indices at (" +
                                     std::to_string(worst[0] + 1) + "," + std::to_string(worst[1] + 1) +
                                     "," + std::to_string(worst[2] + 1) + ")",
                                 worst, out.max_asymmetry);
  }
  for (int k = 0; k < 3; ++k)
    for (const auto &[i, j] : kSymPairs) out.kappa.at(i, j, k) = 0.5 * (h(i, j, k) + h(j, i, k));
  return out;
}

struct ElectricField {
  Vec3 E{};
  Sym2 V;
};

/// E_i = -phi_{,i}, V_ij = E_{i,j} = -phi_{,ij}.
inline ElectricField field_from_potential(const Vec3 &grad_phi, const Sym2 &hess_phi) {
  ElectricField f;
  for (int i = 0; i < 3; ++i) f.E[i] = -grad_phi[i];
  f.V = -1.0 * hess_phi;
  return f;
}

} // namespace thermopiezo
