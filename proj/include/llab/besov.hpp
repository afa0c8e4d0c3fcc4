#pragma once

#include <cmath>

#include "llab/dst.hpp"

namespace llab {

/// Dyadic-block regularity estimator for site fields. Sine modes are grouped
/// into octaves by max(j,k); each octave contributes its Parseval-based
/// sup-norm proxy (block L^2 mass over L/2, so a unit-amplitude single mode
/// scores 1), weighted by 2^{octave * alpha}. Diagnostic only: it feeds the
/// C^B / M_h^B estimates, not any eigenvalue computation.
inline double besov_norm(const ScalarField& f, double alpha) {
  if (!(alpha > -2.0 && alpha < 2.0))
    throw std::invalid_argument("besov_norm: alpha must lie in (-2, 2)");
  const Grid& g = f.grid();
  const int N = g.N();
  ScalarField chat = sine_transform(f);
  const int octaves = 1 + static_cast<int>(std::floor(std::log2(static_cast<double>(N))));
  std::vector<double> mass(octaves, 0.0);
  for (int m = 1; m <= N; ++m)
    for (int n = 1; n <= N; ++n) {
      const int oct = static_cast<int>(std::floor(std::log2(static_cast<double>(std::max(m, n)))));
      mass[oct] += chat(m, n) * chat(m, n);
    }
  const double w = 2.0 * g.delta() / g.L();
  double norm = 0.0;
  for (int oct = 0; oct < octaves; ++oct) {
    const double block = w * std::sqrt(mass[oct]);
    norm = std::max(norm, std::pow(2.0, oct * alpha) * block);
  }
  return norm;
}

}  // namespace llab
