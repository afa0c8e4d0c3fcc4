#pragma once

#include "llab/besov.hpp"
#include "llab/model.hpp"
#include "llab/potential.hpp"
#include "llab/stencil.hpp"

namespace llab {

/// Heuristic norm inputs to the semigroup growth bound
/// ||R_t|| <= M_h e^{omega t}: C_B estimates ||F_1|| + ||F_2|| in C^{-kappa},
/// M_h the product ||e^{-h}|| ||e^h|| in C^{1-kappa} (floored at 1), t0 the
/// contraction horizon with C_B t0^{kappa/2} = 1/2 (capped at 1), and
/// omega = log(M_h)/t0. Diagnostics only; nothing spectral depends on them.
struct DiagnosticsBundle {
  double c_b = 0.0;
  double m_h = 1.0;
  double omega = 0.0;
  double t0 = 1.0;
  double kappa = 0.2;
};

namespace detail {

inline double besov_complex(const ComplexField& f, double alpha) {
  ScalarField re(f.grid()), im(f.grid());
  auto v = f.values();
  auto r = re.values();
  auto i = im.values();
  for (std::size_t s = 0; s < v.size(); ++s) {
    r[s] = v[s].real();
    i[s] = v[s].imag();
  }
  const double a = besov_norm(re, alpha), b = besov_norm(im, alpha);
  return std::sqrt(a * a + b * b);
}

}  // namespace detail

inline DiagnosticsBundle diagnostics(const Grid& g, const MagneticPotential& A,
                                     const Model& m, double kappa = 0.2) {
  if (!(kappa > 0.0 && kappa < 0.25))
    throw std::invalid_argument("diagnostics: kappa must lie in (0, 1/4)");
  if (A.grid != g || m.grid != g) throw std::invalid_argument("diagnostics: grid mismatch");
  const int N = g.N();

  // F1 = 2iA + 2 grad h, edge components averaged onto sites.
  ComplexField f1x(g), f1y(g);
  for (int j = 1; j <= N; ++j)
    for (int k = 1; k <= N; ++k) {
      const double a1 = 0.5 * (A.a1(j - 1, k) + A.a1(j, k));
      const double a2 = 0.5 * (A.a2(j, k - 1) + A.a2(j, k));
      const double d1 = 0.5 * (m.dh1(j - 1, k) + m.dh1(j, k));
      const double d2 = 0.5 * (m.dh2(j, k - 1) + m.dh2(j, k));
      f1x(j, k) = cplx(2.0 * d1, 2.0 * a1);
      f1y(j, k) = cplx(2.0 * d2, 2.0 * a2);
    }

  // F2 = i div A - 2i grad h . A + |A|^2 + zeta.
  ScalarField divA = divergence_at_sites(A);
  ScalarField dhA = edge_dot_at_sites(m.dh1, m.dh2, A.a1, A.a2);
  ScalarField asq = edge_dot_at_sites(A.a1, A.a2, A.a1, A.a2);
  ComplexField f2(g);
  for (int j = 1; j <= N; ++j)
    for (int k = 1; k <= N; ++k)
      f2(j, k) = cplx(asq(j, k) + m.z(j, k), divA(j, k) - 2.0 * dhA(j, k));

  DiagnosticsBundle out;
  out.kappa = kappa;
  out.c_b = detail::besov_complex(f1x, -kappa) + detail::besov_complex(f1y, -kappa) +
            detail::besov_complex(f2, -kappa);
  if (out.c_b < 1e-300) out.c_b = 1e-300;

  ScalarField eh(g), emh(g);
  for (int j = 1; j <= N; ++j)
    for (int k = 1; k <= N; ++k) {
      eh(j, k) = std::exp(m.h(j, k));
      emh(j, k) = std::exp(-m.h(j, k));
    }
  out.m_h = std::max(1.0, besov_norm(eh, 1.0 - kappa) * besov_norm(emh, 1.0 - kappa));
  out.t0 = std::min(1.0, std::pow(2.0 * out.c_b, -2.0 / kappa));
  out.omega = std::log(out.m_h) / out.t0;
  return out;
}

}  // namespace llab
