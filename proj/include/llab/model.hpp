#pragma once

#include <cmath>
#include <numbers>

#include "llab/dst.hpp"
#include "llab/noise.hpp"
#include "llab/stencil.hpp"

namespace llab {

/// Gaussian mollifier symbol at scale eps: multiplies sine mode (m,n) by
/// exp(-eps^2 lambda_{mn}/2). Equivalent to running the discrete heat flow
/// for time eps^2/2.
inline double mollifier_symbol(double eps, double lambda) {
  return std::exp(-0.5 * eps * eps * lambda);
}

inline void require_resolvable(const Grid& g, double eps, const char* who) {
  if (!(eps >= 2.0 * g.delta()))
    throw std::invalid_argument(std::string(who) +
                                ": mollification scale eps under-resolved, need eps >= 2*delta = " +
                                std::to_string(2.0 * g.delta()));
}

inline ScalarField mollify(const NoiseRealization& noise, double eps) {
  require_resolvable(noise.grid, eps, "mollify");
  return apply_sine_multiplier(noise.xi, [eps](double lam) { return mollifier_symbol(eps, lam); });
}

/// Solves the discrete Dirichlet problem -Delta_disc h = f on the box.
/// With G = (-Delta_Dirichlet)^{-1} as the Green operator, the smooth
/// remainder F * xi of the continuum decomposition vanishes identically.
inline ScalarField green_convolve(const ScalarField& f) {
  return apply_sine_multiplier(f, [](double lam) { return 1.0 / lam; });
}

/// The renormalization constant C^(eps) = E |grad_disc h^(eps)|^2 at the box
/// center, evaluated exactly by Parseval over sine modes (no sampling). Uses
/// the same staggered edge-average convention as build_model, so the centered
/// Wick square Z = C_eps - |grad h|^2 has mean exactly zero at the center site.
inline double renorm_constant(const Grid& g, double eps) {
  require_resolvable(g, eps, "renorm_constant");
  const int N = g.N();
  const int jc = g.center_site();
  const double d = g.delta();
  const double pi = std::numbers::pi;
  const double w = pi / (N + 1);

  // Per-mode 1D factors at the center site: A_m = half-sum of the squared
  // forward/backward sine differences over delta, S_m = sin^2 at the site.
  std::vector<double> A(N + 1), S(N + 1), lam1(N + 1);
  for (int m = 1; m <= N; ++m) {
    const double sm = std::sin(0.5 * m * w);
    lam1[m] = 4.0 / (d * d) * sm * sm;
    const double s_prev = std::sin(m * w * (jc - 1));
    const double s_c = std::sin(m * w * jc);
    const double s_next = std::sin(m * w * (jc + 1));
    const double db = (s_c - s_prev) / d;
    const double df = (s_next - s_c) / d;
    A[m] = 0.5 * (db * db + df * df);
    S[m] = s_c * s_c;
  }

  const double basis = 2.0 / (N + 1);
  double c = 0.0;
  for (int m = 1; m <= N; ++m) {
    double row = 0.0;
    for (int n = 1; n <= N; ++n) {
      const double lam = lam1[m] + lam1[n];
      const double sym = mollifier_symbol(eps, lam);
      const double amp = sym / lam;
      row += amp * amp * (A[m] * S[n] + S[m] * A[n]);
    }
    c += row;
  }
  // Noise coefficients in the counting-orthonormal basis have variance
  // 1/delta^2; the basis normalization contributes (2/(N+1))^2.
  return c * basis * basis / (d * d);
}

/// The renormalized model Q = (h, Z): h = G * xi^(eps), gradients on
/// mid-edges, Z = C_eps - |grad h|^2 (the F-remainder term vanishes for the
/// box Green function). xi_eps is kept for the direct operator assembly.
struct Model {
  Grid grid;
  double eps = 0.0;
  ScalarField h;
  ScalarField z;
  double c_eps = 0.0;
  HEdgeField dh1;
  VEdgeField dh2;
  ScalarField xi_eps;
};

inline Model build_model(const NoiseRealization& noise, double eps) {
  Model m;
  m.grid = noise.grid;
  m.eps = eps;
  m.xi_eps = mollify(noise, eps);
  m.h = green_convolve(m.xi_eps);
  grad_to_edges(m.h, m.dh1, m.dh2);
  m.c_eps = renorm_constant(noise.grid, eps);
  ScalarField gsq = grad_sq_at_sites(m.dh1, m.dh2);
  m.z = ScalarField(noise.grid);
  auto zv = m.z.values();
  auto gv = gsq.values();
  for (std::size_t i = 0; i < zv.size(); ++i) zv[i] = m.c_eps - gv[i];
  return m;
}

/// A model with h = Z = 0 (free operator); useful as the zero-noise limit.
inline Model zero_model(const Grid& g, double eps) {
  Model m;
  m.grid = g;
  m.eps = eps;
  m.xi_eps = ScalarField(g);
  m.h = ScalarField(g);
  m.dh1 = HEdgeField(g);
  m.dh2 = VEdgeField(g);
  m.z = ScalarField(g);
  m.c_eps = 0.0;
  return m;
}

}  // namespace llab
