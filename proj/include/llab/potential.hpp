#pragma once

#include <algorithm>
#include <string>

#include "llab/model.hpp"

namespace llab {

enum class PotentialKind { Zero, Uniform, Gff, Custom };

inline const char* to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::Zero: return "zero";
    case PotentialKind::Uniform: return "uniform";
    case PotentialKind::Gff: return "gff";
    default: return "custom";
  }
}

/// Magnetic vector potential sampled at the staggered mid-edge points:
/// a1 lives on horizontal edges (the x-component), a2 on vertical edges.
struct MagneticPotential {
  Grid grid;
  HEdgeField a1;
  VEdgeField a2;
  PotentialKind kind = PotentialKind::Zero;
  double strength = 0.0;       // field strength b for the uniform case
  double holder_norm_estimate = 0.0;
};

/// A(x1,x2) = (b/2)(-x2, x1): uniform magnetic field of strength b.
inline std::array<double, 2> uniform_field_at(double b, std::array<double, 2> p) {
  return {-0.5 * b * p[1], 0.5 * b * p[0]};
}

inline MagneticPotential zero_potential(const Grid& g) {
  return {g, HEdgeField(g), VEdgeField(g), PotentialKind::Zero, 0.0, 0.0};
}

inline MagneticPotential uniform_potential(const Grid& g, double b) {
  if (b == 0.0) return zero_potential(g);
  MagneticPotential out{g, HEdgeField(g), VEdgeField(g), PotentialKind::Uniform, b, 0.0};
  const int N = g.N();
  for (int e = 0; e <= N; ++e)
    for (int k = 1; k <= N; ++k) out.a1(e, k) = -0.5 * b * g.y(k);
  for (int j = 1; j <= N; ++j)
    for (int e = 0; e <= N; ++e) out.a2(j, e) = 0.5 * b * g.x(j + 0.0);
  out.holder_norm_estimate = 0.5 * std::abs(b) * g.L();
  return out;
}

namespace detail {

/// Crude C^{1-kappa} estimate of an edge field: sup |A| plus the largest
/// Holder quotient over nearest-neighbour and dyadic separations along rows.
template <class F>
double holder_estimate_edges(const F& a, double delta, double kappa = 0.2) {
  double sup = 0.0;
  for (double v : a.values()) sup = std::max(sup, std::abs(v));
  double quo = 0.0;
  const auto v = a.values();
  const std::size_t n = v.size();
  for (std::size_t lag = 1; lag < n; lag *= 4) {
    const double dist = std::pow(static_cast<double>(lag) * delta, 1.0 - kappa);
    for (std::size_t i = 0; i + lag < n; i += 3)
      quo = std::max(quo, std::abs(v[i + lag] - v[i]) / dist);
  }
  return sup + quo;
}

}  // namespace detail

/// Samples the Gaussian free field Gamma (white noise through the |k|^{-1}
/// symbol with a Gaussian UV cutoff) and returns A = grad^perp Delta^{-1}
/// Gamma evaluated at mid-edges, via corner samples of the stream function.
/// The construction is exactly divergence-free and its discrete curl equals
/// the regularized Gamma on plaquette centers.
inline MagneticPotential gff_potential(const Grid& g, std::uint64_t seed, double uv_cutoff) {
  require_resolvable(g, uv_cutoff, "gff_potential");
  const int N = g.N();
  NoiseRealization w = sample_white_noise(g, rng::derive(seed, 0x6666ull), 0);
  // Coefficients of Gamma_reg and of the stream function psi = -G * Gamma.
  ScalarField gam_hat = sine_transform(w.xi);
  ScalarField psi_hat(g);
  for (int m = 1; m <= N; ++m)
    for (int n = 1; n <= N; ++n) {
      const double lam = laplacian_eigenvalue(g, m, n);
      const double amp = mollifier_symbol(uv_cutoff, lam) / std::sqrt(lam);
      gam_hat(m, n) *= amp;
      psi_hat(m, n) = -gam_hat(m, n) / lam;
    }
  const std::vector<double> psic = corner_sample(g, psi_hat);
  const int M = N + 1;
  auto pc = [&](int a, int b) { return psic[static_cast<std::size_t>(a) * M + b]; };

  MagneticPotential out{g, HEdgeField(g), VEdgeField(g), PotentialKind::Gff, 0.0, 0.0};
  const double inv = 1.0 / g.delta();
  for (int e = 0; e <= N; ++e)
    for (int k = 1; k <= N; ++k) out.a1(e, k) = -(pc(e, k) - pc(e, k - 1)) * inv;
  for (int j = 1; j <= N; ++j)
    for (int e = 0; e <= N; ++e) out.a2(j, e) = (pc(j, e) - pc(j - 1, e)) * inv;
  out.holder_norm_estimate = std::max(detail::holder_estimate_edges(out.a1, g.delta()),
                                      detail::holder_estimate_edges(out.a2, g.delta()));
  return out;
}

/// The regularized Gamma sampled at the interior plaquette centers
/// (corner indices 1..N-1 each axis), for curl comparisons.
inline std::vector<double> gff_gamma_at_corners(const Grid& g, std::uint64_t seed,
                                                double uv_cutoff) {
  const int N = g.N();
  NoiseRealization w = sample_white_noise(g, rng::derive(seed, 0x6666ull), 0);
  ScalarField gam_hat = sine_transform(w.xi);
  for (int m = 1; m <= N; ++m)
    for (int n = 1; n <= N; ++n) {
      const double lam = laplacian_eigenvalue(g, m, n);
      gam_hat(m, n) *= mollifier_symbol(uv_cutoff, lam) / std::sqrt(lam);
    }
  return corner_sample(g, gam_hat);
}

/// Discrete curl (plaquette circulation / delta^2) at interior plaquette
/// centers; row-major (N-1) x (N-1), plaquette (j,k) centered at corner (j,k).
inline std::vector<double> curl_at_plaquettes(const MagneticPotential& A) {
  const int N = A.grid.N();
  const double inv = 1.0 / A.grid.delta();
  std::vector<double> out(static_cast<std::size_t>(N - 1) * (N - 1));
  for (int j = 1; j <= N - 1; ++j)
    for (int k = 1; k <= N - 1; ++k)
      out[static_cast<std::size_t>(j - 1) * (N - 1) + (k - 1)] =
          (A.a2(j + 1, k) - A.a2(j, k) - A.a1(j, k + 1) + A.a1(j, k)) * inv;
  return out;
}

/// Discrete divergence at sites.
inline ScalarField divergence_at_sites(const MagneticPotential& A) {
  const Grid& g = A.grid;
  const int N = g.N();
  const double inv = 1.0 / g.delta();
  ScalarField out(g);
  for (int j = 1; j <= N; ++j)
    for (int k = 1; k <= N; ++k)
      out(j, k) = (A.a1(j, k) - A.a1(j - 1, k) + A.a2(j, k) - A.a2(j, k - 1)) * inv;
  return out;
}

}  // namespace llab
