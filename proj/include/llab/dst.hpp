#pragma once

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "llab/grid.hpp"

namespace llab {

/// Eigenvalue of the 5-point Dirichlet Laplacian -Delta_disc for sine mode
/// (j,k): (4/delta^2)[sin^2(j pi/(2(N+1))) + sin^2(k pi/(2(N+1)))].
inline double laplacian_eigenvalue(const Grid& g, int j, int k) {
  if (j < 1 || j > g.N() || k < 1 || k > g.N())
    throw std::invalid_argument("laplacian_eigenvalue: mode index out of range");
  const double d = g.delta();
  const double a = std::numbers::pi / (2.0 * (g.N() + 1));
  const double sj = std::sin(j * a), sk = std::sin(k * a);
  return 4.0 / (d * d) * (sj * sj + sk * sk);
}

namespace detail {

/// Cache of FFTW r2r plans keyed by (N, kind). Plan creation is not
/// thread-safe, execution via the new-array interface is; all plans are
/// created with FFTW_UNALIGNED so they can execute on any buffer.
class DstPlans {
 public:
  static fftw_plan get(int n, fftw_r2r_kind kind) {
    static DstPlans inst;
    std::lock_guard<std::mutex> lock(inst.mu_);
    auto key = std::make_pair(n, static_cast<int>(kind));
    auto it = inst.plans_.find(key);
    if (it != inst.plans_.end()) return it->second;
    std::vector<double> buf(static_cast<std::size_t>(n) * n);
    fftw_plan p = fftw_plan_r2r_2d(n, n, buf.data(), buf.data(), kind, kind,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw std::runtime_error("DstPlans: fftw planning failed");
    inst.plans_.emplace(key, p);
    return p;
  }

 private:
  DstPlans() = default;
  ~DstPlans() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }
  std::mutex mu_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

}  // namespace detail

/// In-place unitary 2D sine transform (DST-I, involution) of an N x N array
/// stored row-major. Coefficient (m,n) multiplies the counting-orthonormal
/// basis (2/(N+1)) sin(m pi j/(N+1)) sin(n pi k/(N+1)).
inline void sine_transform_inplace(int N, double* data) {
  fftw_plan p = detail::DstPlans::get(N, FFTW_RODFT00);
  fftw_execute_r2r(p, data, data);
  const double scale = 1.0 / (2.0 * (N + 1));
  const std::size_t n2 = static_cast<std::size_t>(N) * N;
  for (std::size_t i = 0; i < n2; ++i) data[i] *= scale;
}

inline ScalarField sine_transform(const ScalarField& f) {
  ScalarField out = f;
  sine_transform_inplace(f.N(), out.data());
  return out;
}

/// Complex fields transform component-wise.
inline ComplexField sine_transform(const ComplexField& f) {
  const int N = f.N();
  const std::size_t n2 = f.size();
  std::vector<double> re(n2), im(n2);
  auto v = f.values();
  for (std::size_t i = 0; i < n2; ++i) {
    re[i] = v[i].real();
    im[i] = v[i].imag();
  }
  sine_transform_inplace(N, re.data());
  sine_transform_inplace(N, im.data());
  ComplexField out(f.grid());
  auto o = out.values();
  for (std::size_t i = 0; i < n2; ++i) o[i] = cplx(re[i], im[i]);
  return out;
}

/// Applies a diagonal multiplier s(lambda_{mn}) in the sine basis,
/// where lambda is the discrete Dirichlet Laplacian eigenvalue.
template <class FieldT, class Symbol>
FieldT apply_sine_multiplier(const FieldT& f, Symbol&& symbol) {
  const Grid& g = f.grid();
  const int N = g.N();
  FieldT out = sine_transform(f);
  const double d = g.delta();
  const double a = std::numbers::pi / (2.0 * (N + 1));
  std::vector<double> s(N + 1);
  for (int m = 1; m <= N; ++m) {
    const double sm = std::sin(m * a);
    s[m] = 4.0 / (d * d) * sm * sm;
  }
  for (int m = 1; m <= N; ++m)
    for (int n = 1; n <= N; ++n) out(m, n) *= symbol(s[m] + s[n]);
  FieldT back = sine_transform(out);
  return back;
}

/// Dirichlet heat semigroup K_t = exp(t Delta_disc); exact diagonal action in
/// the sine basis, an l2 contraction for t >= 0, identity at t = 0.
template <class FieldT>
FieldT heat_apply(double t, const FieldT& f) {
  if (t < 0.0) throw std::invalid_argument("heat_apply: negative time");
  if (t == 0.0) return f;
  return apply_sine_multiplier(f, [t](double lam) { return std::exp(-t * lam); });
}

/// Samples the sine interpolant of a coefficient array on the half-shifted
/// (corner) lattice: out(j,k) = sum_{m,n} c_{mn} (2/(N+1))
/// sin(m pi (j+1/2)/(N+1)) sin(n pi (k+1/2)/(N+1)), 0 <= j,k <= N.
/// `coeffs` are unitary sine coefficients; output is (N+1) x (N+1) row-major.
inline std::vector<double> corner_sample(const Grid& g, const ScalarField& coeffs) {
  const int N = g.N();
  const int M = N + 1;
  std::vector<double> buf(static_cast<std::size_t>(M) * M, 0.0);
  // RODFT01 of length M sums modes m=1..M with sin(pi m (j+1/2)/M); pad mode M with 0.
  for (int m = 1; m <= N; ++m)
    for (int n = 1; n <= N; ++n)
      buf[static_cast<std::size_t>(m - 1) * M + (n - 1)] = coeffs(m, n);
  fftw_plan p = detail::DstPlans::get(M, FFTW_RODFT01);
  fftw_execute_r2r(p, buf.data(), buf.data());
  const double scale = 1.0 / (2.0 * M);
  for (auto& v : buf) v *= scale;
  return buf;
}

}  // namespace llab
