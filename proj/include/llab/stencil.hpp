#pragma once

#include "llab/grid.hpp"

namespace llab {

/// Forward differences of a site field onto the staggered edge lattices,
/// with the Dirichlet zero extension outside the box.
template <class T>
void grad_to_edges(const Field<T, Loc::Site>& f, Field<T, Loc::HEdge>& d1,
                   Field<T, Loc::VEdge>& d2) {
  const Grid& g = f.grid();
  const int N = g.N();
  const double inv = 1.0 / g.delta();
  d1 = Field<T, Loc::HEdge>(g);
  d2 = Field<T, Loc::VEdge>(g);
  for (int e = 0; e <= N; ++e)
    for (int k = 1; k <= N; ++k) {
      const T right = (e + 1 <= N) ? f(e + 1, k) : T{};
      const T left = (e >= 1) ? f(e, k) : T{};
      d1(e, k) = (right - left) * inv;
    }
  for (int j = 1; j <= N; ++j)
    for (int e = 0; e <= N; ++e) {
      const T up = (e + 1 <= N) ? f(j, e + 1) : T{};
      const T down = (e >= 1) ? f(j, e) : T{};
      d2(j, e) = (up - down) * inv;
    }
}

/// |grad f|^2 at sites from staggered edge differences: the average of the
/// squared differences over the two adjacent edges per direction.
inline ScalarField grad_sq_at_sites(const HEdgeField& d1, const VEdgeField& d2) {
  const Grid& g = d1.grid();
  const int N = g.N();
  ScalarField out(g);
  for (int j = 1; j <= N; ++j)
    for (int k = 1; k <= N; ++k) {
      const double gx = 0.5 * (d1(j - 1, k) * d1(j - 1, k) + d1(j, k) * d1(j, k));
      const double gy = 0.5 * (d2(j, k - 1) * d2(j, k - 1) + d2(j, k) * d2(j, k));
      out(j, k) = gx + gy;
    }
  return out;
}

/// |grad f|^2 at sites by centered differences (h_{j+1} - h_{j-1})/(2 delta);
/// an independent second-order discretization of the same quantity.
inline ScalarField grad_sq_centered(const ScalarField& f) {
  const Grid& g = f.grid();
  const int N = g.N();
  const double inv2 = 1.0 / (2.0 * g.delta());
  ScalarField out(g);
  for (int j = 1; j <= N; ++j)
    for (int k = 1; k <= N; ++k) {
      const double fe = (j + 1 <= N) ? f(j + 1, k) : 0.0;
      const double fw = (j >= 2) ? f(j - 1, k) : 0.0;
      const double fn = (k + 1 <= N) ? f(j, k + 1) : 0.0;
      const double fs = (k >= 2) ? f(j, k - 1) : 0.0;
      const double gx = (fe - fw) * inv2;
      const double gy = (fn - fs) * inv2;
      out(j, k) = gx * gx + gy * gy;
    }
  return out;
}

/// 5-point Dirichlet Laplacian (negative definite convention: Delta f).
template <class T>
Field<T, Loc::Site> laplacian_5pt(const Field<T, Loc::Site>& f) {
  const Grid& g = f.grid();
  const int N = g.N();
  const double inv2 = 1.0 / (g.delta() * g.delta());
  Field<T, Loc::Site> out(g);
  for (int j = 1; j <= N; ++j)
    for (int k = 1; k <= N; ++k) {
      const T fe = (j + 1 <= N) ? f(j + 1, k) : T{};
      const T fw = (j >= 2) ? f(j - 1, k) : T{};
      const T fn = (k + 1 <= N) ? f(j, k + 1) : T{};
      const T fs = (k >= 2) ? f(j, k - 1) : T{};
      out(j, k) = (fe + fw + fn + fs - 4.0 * f(j, k)) * inv2;
    }
  return out;
}

/// Site average of the products of adjacent-edge values, one per direction:
/// used to move edge-field pairs (e.g. grad h . A) onto sites.
template <class T, class U>
auto edge_dot_at_sites(const Field<T, Loc::HEdge>& a1, const Field<T, Loc::VEdge>& a2,
                       const Field<U, Loc::HEdge>& b1, const Field<U, Loc::VEdge>& b2) {
  using R = decltype(T{} * U{});
  const Grid& g = a1.grid();
  const int N = g.N();
  Field<R, Loc::Site> out(g);
  for (int j = 1; j <= N; ++j)
    for (int k = 1; k <= N; ++k) {
      const R gx = 0.5 * (a1(j - 1, k) * b1(j - 1, k) + a1(j, k) * b1(j, k));
      const R gy = 0.5 * (a2(j, k - 1) * b2(j, k - 1) + a2(j, k) * b2(j, k));
      out(j, k) = gx + gy;
    }
  return out;
}

}  // namespace llab
