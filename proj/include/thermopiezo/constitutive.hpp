#pragma once

// Reduced linear constitutive map and the quadratic forms W, F, G, P.
//
// Temperature and its rate couple only through z = theta + beta * thetaDot,
// which is computed once per evaluation. Everything here is a direct
// full-index contraction over the material tensors; no matrices are cached.

#include "thermopiezo/material.hpp"
#include "thermopiezo/tensor_core.hpp"

namespace thermopiezo {

/// Independent constitutive variables at a material point.
struct LocalState {
  Sym2 e;
  Kappa kappa;
  Vec3 E{};
  double theta = 0.0;
  double thetaDot = 0.0;
  Vec3 gradTheta{};
  Sym2 V;
  Vec3 uDot{}; // only enters the kinetic part of the Lyapunov density

  [[nodiscard]] double z(double beta) const { return theta + beta * thetaDot; }
};

/// Dependent fields: stress tau, hyperstress mu, sigma, rho*eta, quadrupole Q, heat flux q.
struct Response {
  Sym2 tau;
  Kappa muTensor;
  Vec3 sigma{};
  double rhoEta = 0.0;
  Sym2 Q;
  Vec3 q{};
};

namespace detail {
inline void require_nonzero_beta(double beta) {
  if (beta == 0.0) throw DivisionByZeroError("beta = 0: the thermal variable must depend on the temperature rate");
}
} // namespace detail

inline Response evaluate(const AnisoMaterial &m, const LocalState &s) {
  detail::require_nonzero_beta(m.beta);
  const auto e = s.e.full();
  const auto k = s.kappa.full();
  const auto V = s.V.full();
  const auto &E = s.E;
  const double z = s.z(m.beta);
  const double inv_beta = 1.0 / m.beta;

  Response r;
  for (const auto &[i, j] : kSymPairs) {
    double tau = m.a14(i, j) * z;
    double mQ = m.a47(i, j) * z; // -Q_ij
    for (int a = 0; a < 3; ++a) {
      tau += m.a13(i, j, a) * E[a];
      mQ += m.a37(a, i, j) * E[a];
      for (int b = 0; b < 3; ++b) {
        tau += m.a11(i, j, a, b) * e(a, b) + m.a17(i, j, a, b) * V(a, b);
        mQ += m.a17(a, b, i, j) * e(a, b) + m.a77(i, j, a, b) * V(a, b);
        for (int c = 0; c < 3; ++c) {
          tau += m.a12(i, j, a, b, c) * k(a, b, c);
          mQ += m.a27(a, b, c, i, j) * k(a, b, c);
        }
      }
    }
    r.tau.at(i, j) = tau;
    r.Q.at(i, j) = -mQ;
  }

  for (int c = 0; c < 3; ++c)
    for (const auto &[i, j] : kSymPairs) {
      double mu = m.a24(i, j, c) * z;
      for (int l = 0; l < 3; ++l) {
        mu += m.a23(i, j, c, l) * E[l];
        for (int h = 0; h < 3; ++h) {
          mu += m.a12(l, h, i, j, c) * e(l, h) + m.a27(i, j, c, l, h) * V(l, h);
          for (int n = 0; n < 3; ++n) mu += m.a22(i, j, c, l, h, n) * k(l, h, n);
        }
      }
      r.muTensor.at(i, j, c) = mu;
    }

  double mRhoEta = m.a44 * z + m.alpha4;
  for (int i = 0; i < 3; ++i) {
    double mSigma = m.a34.data[i] * z;
    double heat = m.a56.data[i] * s.thetaDot; // beta * (-q_i / T0)
    for (int a = 0; a < 3; ++a) {
      mSigma += m.a33(i, a) * E[a];
      heat += m.a66(i, a) * s.gradTheta[a];
      for (int b = 0; b < 3; ++b) {
        mSigma += m.a13(a, b, i) * e(a, b) + m.a37(i, a, b) * V(a, b);
        for (int c = 0; c < 3; ++c) mSigma += m.a23(a, b, c, i) * k(a, b, c);
      }
    }
    r.sigma[i] = -mSigma;
    r.q[i] = -m.T0 * inv_beta * heat;

    mRhoEta += m.a34.data[i] * E[i] + inv_beta * m.a56.data[i] * s.gradTheta[i];
    for (int j = 0; j < 3; ++j) {
      mRhoEta += m.a14(i, j) * e(i, j) + m.a47(i, j) * V(i, j);
      for (int c = 0; c < 3; ++c) mRhoEta += m.a24(i, j, c) * k(i, j, c);
    }
  }
  mRhoEta += inv_beta * m.gamma * s.thetaDot;
  r.rhoEta = -mRhoEta;
  return r;
}

/// W = 1/2 a11 e e + 1/2 a22 kappa kappa + a12 e kappa
inline double form_W(const AnisoMaterial &m, const Sym2 &e_in, const Kappa &kappa) {
  const auto e = e_in.full();
  const auto k = kappa.full();
  double w11 = 0.0, w22 = 0.0, w12 = 0.0;
  const double *a11 = m.a11.data.data();
  const double *a12 = m.a12.data.data();
  const double *a22 = m.a22.data.data();
  // Row-major traversal: the trailing index group is contiguous.
  for (std::size_t p = 0; p < 9; ++p)
    for (std::size_t q = 0; q < 9; ++q) w11 += a11[9 * p + q] * e.data[p] * e.data[q];
  for (std::size_t p = 0; p < 27; ++p) {
    if (k.data[p] == 0.0) continue;
    double row = 0.0;
    for (std::size_t q = 0; q < 27; ++q) row += a22[27 * p + q] * k.data[q];
    w22 += k.data[p] * row;
  }
  for (std::size_t p = 0; p < 9; ++p) {
    if (e.data[p] == 0.0) continue;
    double row = 0.0;
    for (std::size_t q = 0; q < 27; ++q) row += a12[27 * p + q] * k.data[q];
    w12 += e.data[p] * row;
  }
  return 0.5 * w11 + 0.5 * w22 + w12;
}

/// F = -1/2 a33 E E - 1/2 a77 V V - a37 E V - a34 E z - a47 V z
inline double form_F(const AnisoMaterial &m, const Vec3 &E, const Sym2 &V_in, double z) {
  const auto V = V_in.full();
  double f33 = 0.0, f77 = 0.0, f37 = 0.0, f34 = 0.0, f47 = 0.0;
  for (int i = 0; i < 3; ++i) {
    f34 += m.a34.data[i] * E[i];
    for (int j = 0; j < 3; ++j) {
      f33 += m.a33(i, j) * E[i] * E[j];
      f47 += m.a47(i, j) * V(i, j);
      for (int k = 0; k < 3; ++k) {
        f37 += m.a37(i, j, k) * E[i] * V(j, k);
        for (int l = 0; l < 3; ++l) f77 += m.a77(i, j, k, l) * V(i, j) * V(k, l);
      }
    }
  }
  return -0.5 * f33 - 0.5 * f77 - f37 - f34 * z - f47 * z;
}

/// G = F - 1/2 (a44 + gamma / beta^2) z^2
inline double form_G(const AnisoMaterial &m, const Vec3 &E, const Sym2 &V, double z) {
  detail::require_nonzero_beta(m.beta);
  return form_F(m, E, V, z) - 0.5 * (m.a44 + m.gamma / (m.beta * m.beta)) * z * z;
}

/// P(xi, eta) = (gamma xi^2 + 2 a56 xi eta + a66 eta eta) / beta
inline double form_P(const AnisoMaterial &m, double xi, const Vec3 &eta) {
  detail::require_nonzero_beta(m.beta);
  double sum = m.gamma * xi * xi;
  for (int i = 0; i < 3; ++i) {
    sum += 2.0 * m.a56.data[i] * xi * eta[i];
    for (int j = 0; j < 3; ++j) sum += m.a66(i, j) * eta[i] * eta[j];
  }
  return sum / m.beta;
}

/// W + G + 1/2 rho |uDot|^2 + 1/2 beta P(-theta/beta, grad theta)
inline double lyapunov_density(const AnisoMaterial &m, const LocalState &s) {
  detail::require_nonzero_beta(m.beta);
  double kinetic = 0.0;
  for (double v : s.uDot) kinetic += v * v;
  return form_W(m, s.e, s.kappa) + form_G(m, s.E, s.V, s.z(m.beta)) + 0.5 * m.rho * kinetic +
         0.5 * m.beta * form_P(m, -s.theta / m.beta, s.gradTheta);
}

} // namespace thermopiezo
