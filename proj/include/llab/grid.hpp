#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace llab {

inline constexpr const char* kVersion = "0.1.0";

using cplx = std::complex<double>;

/// Open box B_{center,L} with N x N interior lattice sites and zero Dirichlet
/// boundary. Spacing is delta = L/(N+1) so that sites
///   x(j,k) = center + (-L/2 + j*delta, -L/2 + k*delta),  1 <= j,k <= N
/// are strictly interior and the sine basis sin(m pi j/(N+1)) satisfies the
/// boundary condition exactly.
class Grid {
 public:
  Grid(double L, int N, std::array<double, 2> center = {0.0, 0.0})
      : L_(L), N_(N), center_(center) {
    if (!(L > 0.0)) throw std::invalid_argument("Grid: side length L must be positive, got " + std::to_string(L));
    if (N < 2) throw std::invalid_argument("Grid: need at least 2 interior points per axis, got " + std::to_string(N));
    delta_ = L / static_cast<double>(N + 1);
  }

  double L() const { return L_; }
  int N() const { return N_; }
  double delta() const { return delta_; }
  const std::array<double, 2>& center() const { return center_; }

  double x(double j) const { return center_[0] - 0.5 * L_ + j * delta_; }
  double y(double k) const { return center_[1] - 0.5 * L_ + k * delta_; }
  std::array<double, 2> site(int j, int k) const { return {x(j), y(k)}; }

  /// 1-based index of the site used as "box center" (exact center for odd N).
  int center_site() const { return (N_ + 1) / 2; }

  std::size_t n_sites() const { return static_cast<std::size_t>(N_) * N_; }

  bool operator==(const Grid& o) const {
    return L_ == o.L_ && N_ == o.N_ && center_ == o.center_;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  double L_;
  int N_;
  std::array<double, 2> center_;
  double delta_;
};

inline Grid make_grid(double L, int N, std::array<double, 2> center = {0.0, 0.0}) {
  return Grid(L, N, center);
}

/// Where a lattice field lives. Site fields are N x N. Edge fields carry one
/// value per lattice link, including the links that touch the boundary:
/// a horizontal edge (e,k), e in [0,N], joins site (e,k) to (e+1,k) where
/// j = 0 and j = N+1 are boundary columns (field value 0 there).
enum class Loc { Site, HEdge, VEdge };

template <class T, Loc Where>
class Field {
 public:
  Field() : grid_(1.0, 2) {}
  explicit Field(const Grid& g, T fill = T{}) : grid_(g), v_(count(g), fill) {}

  static std::size_t count(const Grid& g) {
    const std::size_t n = static_cast<std::size_t>(g.N());
    if constexpr (Where == Loc::Site) return n * n;
    else return (n + 1) * n;  // HEdge: (N+1) x N, VEdge: N x (N+1)
  }

  const Grid& grid() const { return grid_; }
  int N() const { return grid_.N(); }

  // Site fields: (j,k) with 1 <= j,k <= N, row-major by (j,k).
  // HEdge: (e,k) with 0 <= e <= N, 1 <= k <= N. VEdge: (j,e) likewise.
  T& operator()(int a, int b) { return v_[index(a, b)]; }
  const T& operator()(int a, int b) const { return v_[index(a, b)]; }

  std::span<T> values() { return v_; }
  std::span<const T> values() const { return v_; }
  T* data() { return v_.data(); }
  const T* data() const { return v_.data(); }
  std::size_t size() const { return v_.size(); }

  void fill(T value) { std::fill(v_.begin(), v_.end(), value); }

  bool same_grid(const Grid& g) const { return grid_ == g; }

 private:
  std::size_t index(int a, int b) const {
    const int n = grid_.N();
    if constexpr (Where == Loc::Site) {
      return static_cast<std::size_t>(a - 1) * n + (b - 1);
    } else if constexpr (Where == Loc::HEdge) {
      return static_cast<std::size_t>(a) * n + (b - 1);
    } else {
      return static_cast<std::size_t>(a - 1) * (n + 1) + b;
    }
  }

  Grid grid_;
  std::vector<T> v_;
};

using ScalarField = Field<double, Loc::Site>;
using ComplexField = Field<cplx, Loc::Site>;
using HEdgeField = Field<double, Loc::HEdge>;
using VEdgeField = Field<double, Loc::VEdge>;
using ComplexHEdgeField = Field<cplx, Loc::HEdge>;
using ComplexVEdgeField = Field<cplx, Loc::VEdge>;

// l2 norms and inner products in the delta^2-weighted (discrete L^2) metric.

template <class T, Loc W>
double norm_sumsq(const Field<T, W>& f) {
  double s = 0.0;
  for (const auto& v : f.values()) s += std::norm(v);
  return s;
}
template <Loc W>
double norm_sumsq(const Field<double, W>& f) {
  double s = 0.0;
  for (double v : f.values()) s += v * v;
  return s;
}

template <class T, Loc W>
double l2_norm(const Field<T, W>& f) {
  return f.grid().delta() * std::sqrt(norm_sumsq(f));
}

inline cplx inner(const ComplexField& a, const ComplexField& b) {
  cplx s = 0.0;
  auto va = a.values(), vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) s += std::conj(va[i]) * vb[i];
  const double d = a.grid().delta();
  return s * d * d;
}

inline double inner(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  auto va = a.values(), vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) s += va[i] * vb[i];
  const double d = a.grid().delta();
  return s * d * d;
}

inline ComplexField to_complex(const ScalarField& f) {
  ComplexField out(f.grid());
  auto vi = f.values();
  auto vo = out.values();
  for (std::size_t i = 0; i < vi.size(); ++i) vo[i] = vi[i];
  return out;
}

template <class T, Loc W>
bool all_finite(const Field<T, W>& f) {
  for (const auto& v : f.values()) {
    if constexpr (std::is_same_v<T, double>) {
      if (!std::isfinite(v)) return false;
    } else {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
  }
  return true;
}

}  // namespace llab
