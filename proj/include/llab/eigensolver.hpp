#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <optional>
#include <string>

#include "llab/dst.hpp"
#include "llab/operator.hpp"

namespace llab {

struct Provenance {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double eps = 0.0;
  double L = 0.0;
  int N = 0;
  std::string a_spec = "zero";
  std::string solver;
  int iterations = 0;
};

/// Eigenvalues ascending with per-pair residual ||Hv - lambda v||; cluster_id
/// groups near-degenerate neighbours (consecutive gap < 1e-3 * spread).
struct SpectrumResult {
  std::vector<double> eigenvalues;
  std::vector<double> residuals;
  std::vector<ComplexField> eigenvectors;
  std::vector<int> cluster_id;
  Provenance provenance;
  bool converged = true;
};

inline void annotate_clusters(SpectrumResult& r) {
  const std::size_t n = r.eigenvalues.size();
  r.cluster_id.assign(n, 0);
  if (n < 2) return;
  const double spread = std::max(r.eigenvalues.back() - r.eigenvalues.front(), 1e-300);
  int cid = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (r.eigenvalues[i] - r.eigenvalues[i - 1] >= 1e-3 * spread) ++cid;
    r.cluster_id[i] = cid;
  }
}

inline double rayleigh_quotient(const MagneticOperator& H, const ComplexField& u) {
  const double nrm = norm_sumsq(u);
  if (nrm == 0.0) throw std::invalid_argument("rayleigh_quotient: zero vector");
  ComplexField Hu = apply(H, u);
  cplx q = 0.0;
  auto a = Hu.values();
  auto b = u.values();
  for (std::size_t i = 0; i < a.size(); ++i) q += std::conj(b[i]) * a[i];
  q /= nrm;
  if (std::abs(q.imag()) > 1e-12 * std::max(1.0, std::abs(q.real())))
    throw std::runtime_error("rayleigh_quotient: non-real value, operator not Hermitian?");
  return q.real();
}

namespace detail {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline void apply_op(const MagneticOperator& H, const VectorXcd& in, VectorXcd& out) {
  out.resize(in.size());
  apply(H, in.data(), out.data());
}

inline VectorXcd random_vector(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  VectorXcd v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = cplx(rng::standard_normal(seed, stream, 2 * i),
                rng::standard_normal(seed, stream, 2 * i + 1));
  return v;
}

/// Orthonormalizes the columns of X in place (CholQR, repeated; falls back to
/// column-by-column Gram-Schmidt with random replacement of dependent
/// columns). Returns false only if everything degenerated.
inline bool orthonormalize(MatrixXcd& X, std::uint64_t seed = 99) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    MatrixXcd G = X.adjoint() * X;
    Eigen::LLT<MatrixXcd> llt(G);
    if (llt.info() == Eigen::Success) {
      X = llt.matrixU().template triangularView<Eigen::Upper>().template solve<Eigen::OnTheRight>(X);
      if (attempt == 1) return true;
      continue;  // second pass tightens orthogonality
    }
    // Rank-deficient block: modified Gram-Schmidt with replacements.
    for (int c = 0; c < X.cols(); ++c) {
      for (int rep = 0; rep < 3; ++rep) {
        for (int p = 0; p < c; ++p) X.col(c) -= (X.col(p).adjoint() * X.col(c))(0) * X.col(p);
        const double nrm = X.col(c).norm();
        if (nrm > 1e-8) {
          X.col(c) /= nrm;
          break;
        }
        X.col(c) = random_vector(X.rows(), seed, 7000 + c + 13 * rep).normalized();
      }
    }
    return true;
  }
  return true;
}

/// (-Delta_disc + c)^{-1} via the sine basis; spectrally equivalent to the
/// assembled operators, used to precondition the iterative eigensolvers.
class DstPreconditioner {
 public:
  DstPreconditioner(const Grid& g, double c) : grid_(g), c_(c) {
    const int N = g.N();
    inv_.resize(static_cast<std::size_t>(N) * N);
    for (int m = 1; m <= N; ++m)
      for (int n = 1; n <= N; ++n)
        inv_[static_cast<std::size_t>(m - 1) * N + (n - 1)] =
            1.0 / (laplacian_eigenvalue(g, m, n) + c_);
  }

  void apply_inplace(VectorXcd& v) const {
    const int N = grid_.N();
    const std::size_t n2 = inv_.size();
    std::vector<double> re(n2), im(n2);
    for (std::size_t i = 0; i < n2; ++i) {
      re[i] = v[i].real();
      im[i] = v[i].imag();
    }
    sine_transform_inplace(N, re.data());
    sine_transform_inplace(N, im.data());
    for (std::size_t i = 0; i < n2; ++i) {
      re[i] *= inv_[i];
      im[i] *= inv_[i];
    }
    sine_transform_inplace(N, re.data());
    sine_transform_inplace(N, im.data());
    for (std::size_t i = 0; i < n2; ++i) v[i] = cplx(re[i], im[i]);
  }

  double level() const { return c_; }

 private:
  Grid grid_;
  double c_;
  std::vector<double> inv_;
};

inline ComplexField field_from_vector(const Grid& g, const VectorXcd& v) {
  ComplexField f(g);
  std::copy(v.data(), v.data() + v.size(), f.data());
  return f;
}

inline void finalize_result(SpectrumResult& r, const MagneticOperator& H,
                            const MatrixXcd& X, const VectorXd& lam, int k,
                            bool want_vectors) {
  const Grid& g = H.grid;
  r.eigenvalues.resize(k);
  r.residuals.resize(k);
  VectorXcd Hx(X.rows());
  for (int i = 0; i < k; ++i) {
    r.eigenvalues[i] = lam[i];
    VectorXcd xi = X.col(i);
    apply_op(H, xi, Hx);
    r.residuals[i] = (Hx - lam[i] * xi).norm();
    if (want_vectors) r.eigenvectors.push_back(field_from_vector(g, xi));
  }
  annotate_clusters(r);
}

}  // namespace detail

struct LanczosOptions {
  int max_basis = 0;        // 0: automatic
  int max_steps = 20000;
  bool want_vectors = false;
  std::uint64_t seed = 1;
  int check_every = 8;
};

/// Lowest-k eigenpairs by Lanczos with full reorthogonalization (two-pass
/// classical Gram-Schmidt against the whole retained basis) and thick
/// restarts. The operator is shifted positive-definite by the Gershgorin
/// lower bound before iterating; breakdowns restart with a fresh seeded
/// random direction. The small projected matrix is maintained as V^H H V, so
/// restarts and breakdown replacements keep Rayleigh-Ritz values exact.
inline SpectrumResult lowest_eigs(const MagneticOperator& H, int k, double tol,
                                  LanczosOptions opt = {}) {
  using namespace detail;
  if (k < 1 || k > 32) throw std::invalid_argument("lowest_eigs: need 1 <= k <= 32");
  const std::size_t n = H.grid.n_sites();
  if (static_cast<std::size_t>(k) > n) throw std::invalid_argument("lowest_eigs: k exceeds dimension");

  const double sigma = -gershgorin_lower(H) + 1.0;  // H + sigma is positive definite
  MagneticOperator Hs = H;
  Hs.shift += sigma;

  const int keep = std::min<int>(static_cast<int>(n) - 2, std::max(2 * k + 2, 12));
  int mmax = opt.max_basis > 0 ? opt.max_basis : std::max(keep + 60, 96);
  mmax = std::min<int>(mmax, static_cast<int>(n));

  MatrixXcd V(n, mmax + 1);
  MatrixXcd T = MatrixXcd::Zero(mmax + 1, mmax + 1);
  VectorXcd w(n), coef, coef2;

  V.col(0) = random_vector(n, rng::derive(opt.seed, 0x1a2cull), 0).normalized();
  int m = 0;  // index of the column being expanded
  int steps = 0;
  int restarts = 0;
  SpectrumResult out;
  out.provenance.solver = "lanczos";
  out.provenance.N = H.grid.N();
  out.provenance.L = H.grid.L();

  Eigen::SelfAdjointEigenSolver<MatrixXcd> small;
  VectorXd theta;
  MatrixXcd S;

  auto ritz_residual_ok = [&](int upto) -> bool {
    // upto = current basis size (columns 0..upto-1 have T fully formed)
    small.compute(T.topLeftCorner(upto, upto));
    theta = small.eigenvalues();
    S = small.eigenvectors();
    if (upto <= k) return false;
    const double beta_next = std::abs(T(upto, upto - 1));
    for (int i = 0; i < k; ++i) {
      const double res = beta_next * std::abs(S(upto - 1, i));
      if (res > tol * std::max(1.0, std::abs(theta[i] - sigma))) return false;
    }
    return true;
  };

  bool converged = false;
  int basis = 1;  // number of valid columns
  while (steps < opt.max_steps) {
    // Expand column m.
    apply_op(Hs, V.col(m), w);
    coef.noalias() = V.leftCols(basis).adjoint() * w;
    w.noalias() -= V.leftCols(basis) * coef;
    coef2.noalias() = V.leftCols(basis).adjoint() * w;
    w.noalias() -= V.leftCols(basis) * coef2;
    coef += coef2;
    T.col(m).head(basis) = coef;
    T.row(m).head(basis) = coef.adjoint();
    const double beta = w.norm();
    ++steps;

    const double btol = 1e-13 * std::max(1.0, coef.cwiseAbs().maxCoeff());
    if (basis == mmax + 1) {
      // Basis full: no room for the residual vector; restart below.
    } else if (beta > btol) {
      V.col(basis) = w / beta;
      T(basis, m) = beta;
      T(m, basis) = beta;
    } else {
      // Breakdown: invariant subspace hit; continue with a random direction.
      VectorXcd r = random_vector(n, rng::derive(opt.seed, 0xb0b0ull), 100 + steps);
      r -= V.leftCols(basis) * (V.leftCols(basis).adjoint() * r).eval();
      r -= V.leftCols(basis) * (V.leftCols(basis).adjoint() * r).eval();
      const double rn = r.norm();
      if (rn < 1e-14) break;  // dimension exhausted
      V.col(basis) = r / rn;
      // Couplings of the new direction fill in when it is expanded.
    }
    m = basis < mmax + 1 ? basis : mmax;
    basis = std::min(basis + 1, mmax + 1);

    const bool full = (basis == mmax + 1);
    if (steps % opt.check_every == 0 || full) {
      const int upto = basis - 1;  // last column's T entries are complete
      if (upto > k && ritz_residual_ok(upto)) {
        converged = true;
        m = upto;
        break;
      }
      if (full) {
        // Thick restart: keep the lowest Ritz vectors plus the residual vector.
        const int upto2 = basis - 1;
        const int nk = std::min(keep, upto2 - 1);
        MatrixXcd Y = V.leftCols(upto2) * S.leftCols(nk);
        V.leftCols(nk) = Y;
        V.col(nk) = V.col(upto2);
        T.setZero();
        for (int i = 0; i < nk; ++i) T(i, i) = theta[i];
        // Arrow couplings to the residual direction regenerate when it is
        // expanded, since T is maintained as V^H H V.
        m = nk;
        basis = nk + 1;
        ++restarts;
      }
    }
  }

  const int upto = std::min(m, static_cast<int>(basis) - 1);
  small.compute(T.topLeftCorner(upto, upto));
  theta = small.eigenvalues();
  S = small.eigenvectors();
  const int kk = std::min(k, upto);
  MatrixXcd X = V.leftCols(upto) * S.leftCols(kk);
  VectorXd lam = theta.head(kk).array() - sigma;
  out.provenance.iterations = steps;
  detail::finalize_result(out, H, X, lam, kk, opt.want_vectors);
  // The convergence flag reports the true residual contract on the
  // unshifted operator.
  out.converged = (kk == k);
  for (int i = 0; i < kk; ++i)
    if (out.residuals[i] > tol * std::max(1.0, std::abs(out.eigenvalues[i])))
      out.converged = false;
  (void)converged;
  return out;
}

struct LobpcgOptions {
  int block = 0;  // 0: k + guard
  int max_iters = 500;
  bool want_vectors = false;
  std::uint64_t seed = 1;
  std::optional<Eigen::MatrixXcd> initial;  // warm start (n x >=k)
};

/// Lowest-k eigenpairs by LOBPCG preconditioned with the exact inverse of
/// (-Delta_disc + c) in the sine basis. Same residual contract as
/// lowest_eigs; the fast path for Monte Carlo sweeps.
inline SpectrumResult lowest_eigs_pcg(const MagneticOperator& H, int k, double tol,
                                      LobpcgOptions opt = {}) {
  using namespace detail;
  if (k < 1 || k > 64) throw std::invalid_argument("lowest_eigs_pcg: need 1 <= k <= 64");
  const std::size_t n = H.grid.n_sites();
  const int nb = std::min<int>(static_cast<int>(n),
                               opt.block > 0 ? std::max(opt.block, k) : k + std::max(2, k / 2));

  const double c = 1.0 + std::max(0.0, -gershgorin_lower(H));
  DstPreconditioner P(H.grid, c);

  MatrixXcd X(n, nb);
  if (opt.initial && opt.initial->rows() == static_cast<Eigen::Index>(n)) {
    const int have = std::min<int>(nb, opt.initial->cols());
    X.leftCols(have) = opt.initial->leftCols(have);
    for (int i = have; i < nb; ++i)
      X.col(i) = random_vector(n, rng::derive(opt.seed, 0x10bull), i);
  } else {
    for (int i = 0; i < nb; ++i)
      X.col(i) = random_vector(n, rng::derive(opt.seed, 0x10bull), i);
  }
  orthonormalize(X, opt.seed);

  MatrixXcd HX(n, nb), W(n, nb), Pdir, HP, HW(n, nb);
  for (int i = 0; i < nb; ++i) {
    VectorXcd hx(n), xi = X.col(i);
    apply_op(H, xi, hx);
    HX.col(i) = hx;
  }

  SpectrumResult out;
  out.provenance.solver = "lobpcg";
  out.provenance.N = H.grid.N();
  out.provenance.L = H.grid.L();

  Eigen::SelfAdjointEigenSolver<MatrixXcd> es;
  VectorXd lam = VectorXd::Zero(nb);
  int it = 0;
  bool converged = false;
  for (; it < opt.max_iters; ++it) {
    // Rayleigh-Ritz within X.
    MatrixXcd G = X.adjoint() * HX;
    es.compute(0.5 * (G + G.adjoint()));
    lam = es.eigenvalues();
    X = X * es.eigenvectors();
    HX = HX * es.eigenvectors();

    // Residuals and convergence on the k wanted pairs.
    int done = 0;
    for (int i = 0; i < k; ++i) {
      const double res = (HX.col(i) - lam[i] * X.col(i)).norm();
      if (res <= tol * std::max(1.0, std::abs(lam[i]))) ++done;
    }
    if (done == k) {
      converged = true;
      break;
    }

    // Preconditioned residuals.
    for (int i = 0; i < nb; ++i) {
      VectorXcd r = HX.col(i) - lam[i] * X.col(i);
      P.apply_inplace(r);
      W.col(i) = r;
    }
    // Orthogonalize W (and P) against X, then among themselves.
    W -= X * (X.adjoint() * W).eval();
    W -= X * (X.adjoint() * W).eval();
    orthonormalize(W, opt.seed + 1);
    int scols = 2 * nb;
    if (Pdir.cols() > 0) {
      Pdir -= X * (X.adjoint() * Pdir).eval();
      Pdir -= W * (W.adjoint() * Pdir).eval();
      MatrixXcd G2 = Pdir.adjoint() * Pdir;
      Eigen::LLT<MatrixXcd> llt(G2);
      if (llt.info() == Eigen::Success && G2.diagonal().real().minCoeff() > 1e-12) {
        Pdir = llt.matrixU().template triangularView<Eigen::Upper>().template solve<Eigen::OnTheRight>(Pdir);
        HP = llt.matrixU().template triangularView<Eigen::Upper>().template solve<Eigen::OnTheRight>(HP);
        scols = 3 * nb;
      } else {
        Pdir.resize(n, 0);
        HP.resize(n, 0);
      }
    }

    for (int i = 0; i < nb; ++i) {
      VectorXcd hw(n), wi = W.col(i);
      apply_op(H, wi, hw);
      HW.col(i) = hw;
    }

    MatrixXcd Smat(n, scols), HS(n, scols);
    Smat.leftCols(nb) = X;
    Smat.middleCols(nb, nb) = W;
    HS.leftCols(nb) = HX;
    HS.middleCols(nb, nb) = HW;
    if (scols == 3 * nb) {
      Smat.rightCols(nb) = Pdir;
      HS.rightCols(nb) = HP;
    }

    MatrixXcd GA = Smat.adjoint() * HS;
    MatrixXcd GB = Smat.adjoint() * Smat;
    GA = 0.5 * (GA + GA.adjoint()).eval();
    GB = 0.5 * (GB + GB.adjoint()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXcd> ges(GA, GB);
    if (ges.info() != Eigen::Success) {
      // Gram breakdown: restart the search directions.
      Pdir.resize(n, 0);
      HP.resize(n, 0);
      continue;
    }
    MatrixXcd C = ges.eigenvectors().leftCols(nb);
    MatrixXcd Cwp = C.bottomRows(scols - nb);
    MatrixXcd Swp(n, scols - nb), HSwp(n, scols - nb);
    Swp.leftCols(nb) = W;
    HSwp.leftCols(nb) = HW;
    if (scols == 3 * nb) {
      Swp.rightCols(nb) = Pdir;
      HSwp.rightCols(nb) = HP;
    }
    Pdir = Swp * Cwp;
    HP = HSwp * Cwp;
    X = X * C.topRows(nb) + Pdir;
    HX = HX * C.topRows(nb) + HP;
    lam = ges.eigenvalues().head(nb);
  }

  out.converged = converged;
  out.provenance.iterations = it;
  // Final tidy Rayleigh-Ritz for accurate pairs.
  orthonormalize(X, opt.seed + 2);
  for (int i = 0; i < nb; ++i) {
    VectorXcd hx(n), xi = X.col(i);
    apply_op(H, xi, hx);
    HX.col(i) = hx;
  }
  MatrixXcd G = X.adjoint() * HX;
  es.compute(0.5 * (G + G.adjoint()));
  MatrixXcd Xfin = X * es.eigenvectors().leftCols(k);
  VectorXd lfin = es.eigenvalues().head(k);
  detail::finalize_result(out, H, Xfin, lfin, k, opt.want_vectors);
  if (!converged) {
    out.converged = true;
    for (int i = 0; i < k; ++i)
      if (out.residuals[i] > tol * std::max(1.0, std::abs(out.eigenvalues[i])))
        out.converged = false;
  }
  return out;
}

struct ChebsiOptions {
  int block = 0;       // 0: k + guard
  int degree = 180;
  int max_sweeps = 40;
  std::uint64_t seed = 1;
  bool want_vectors = false;
};

/// Chebyshev-filtered subspace iteration: amplifies the band below an
/// adaptive cut and damps [cut, lambda_max]; the solver of choice when many
/// near-degenerate low modes are wanted (Landau clusters).
inline SpectrumResult chebyshev_filtered_lowest(const MagneticOperator& H, int k, double tol,
                                                ChebsiOptions opt = {}) {
  using namespace detail;
  const std::size_t n = H.grid.n_sites();
  const int nb = std::min<int>(static_cast<int>(n),
                               opt.block > 0 ? std::max(opt.block, k) : k + std::max(8, k / 4));
  const double ub = gershgorin_upper(H) + 1.0;
  double lb = gershgorin_lower(H);

  MatrixXcd X(n, nb), Y(n, nb), Z(n, nb);
  for (int i = 0; i < nb; ++i)
    X.col(i) = random_vector(n, rng::derive(opt.seed, 0xc4ebull), i);
  orthonormalize(X, opt.seed);

  double cut = lb + 0.05 * (ub - lb);  // refined after the first sweep
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es;
  VectorXd lam;
  SpectrumResult out;
  out.provenance.solver = "chebsi";
  out.provenance.N = H.grid.N();
  out.provenance.L = H.grid.L();

  auto filter = [&](MatrixXcd& B) {
    // Scaled Chebyshev three-term recurrence on [cut, ub].
    const double e = 0.5 * (ub - cut), c0 = 0.5 * (ub + cut);
    const double sigma1 = e / (c0 - lb);
    double sigma = sigma1;
    Y.resize(n, B.cols());
    Z.resize(n, B.cols());
    for (int i = 0; i < B.cols(); ++i) {
      VectorXcd t(n), bi = B.col(i);
      apply_op(H, bi, t);
      Y.col(i) = (t - c0 * bi) * (sigma1 / e);
    }
    for (int d = 2; d <= opt.degree; ++d) {
      const double sigma_new = 1.0 / (2.0 / sigma1 - sigma);
      for (int i = 0; i < B.cols(); ++i) {
        VectorXcd t(n), yi = Y.col(i);
        apply_op(H, yi, t);
        Z.col(i) = (t - c0 * yi) * (2.0 * sigma_new / e) - (sigma * sigma_new) * B.col(i);
      }
      B.swap(Y);  // B <- X_{d-1}
      Y.swap(Z);  // Y <- X_d, Z left as scratch
      sigma = sigma_new;
    }
    B = Y;
  };

  int sweep = 0;
  bool converged = false;
  MatrixXcd HX(n, nb);
  for (; sweep < opt.max_sweeps; ++sweep) {
    filter(X);
    orthonormalize(X, opt.seed + sweep);
    for (int i = 0; i < nb; ++i) {
      VectorXcd hx(n), xi = X.col(i);
      apply_op(H, xi, hx);
      HX.col(i) = hx;
    }
    MatrixXcd G = X.adjoint() * HX;
    es.compute(0.5 * (G + G.adjoint()));
    lam = es.eigenvalues();
    X = X * es.eigenvectors();
    HX = HX * es.eigenvectors();
    lb = std::min(lb, lam[0]);
    // Filter interval hugs the current subspace: damp above the top Ritz value.
    cut = lam[nb - 1] + 1e-3 * (ub - lam[nb - 1]);
    int done = 0;
    for (int i = 0; i < k; ++i) {
      const double res = (HX.col(i) - lam[i] * X.col(i)).norm();
      if (res <= tol * std::max(1.0, std::abs(lam[i]))) ++done;
    }
    if (done == k) {
      converged = true;
      break;
    }
  }
  out.converged = converged;
  out.provenance.iterations = sweep;
  MatrixXcd Xfin = X.leftCols(k);
  VectorXd lfin = lam.head(k);
  detail::finalize_result(out, H, Xfin, lfin, k, opt.want_vectors);
  return out;
}

/// Builds the dense Hermitian matrix column-by-column through apply() and
/// fully diagonalizes it; the brute-force reference for small grids.
inline Eigen::MatrixXcd dense_matrix(const MagneticOperator& H) {
  const std::size_t n = H.grid.n_sites();
  Eigen::MatrixXcd M(n, n);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n), col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    apply(H, e.data(), col.data());
    M.col(j) = col;
    e[j] = 0.0;
  }
  return M;
}

inline SpectrumResult dense_oracle(const MagneticOperator& H, bool want_vectors = false) {
  if (H.grid.N() > 16)
    throw std::invalid_argument("dense_oracle: grid too large (N must be <= 16)");
  Eigen::MatrixXcd M = dense_matrix(H);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
  SpectrumResult out;
  out.provenance.solver = "dense";
  out.provenance.N = H.grid.N();
  out.provenance.L = H.grid.L();
  const std::size_t n = H.grid.n_sites();
  out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  out.residuals.assign(n, 0.0);
  if (want_vectors)
    for (std::size_t i = 0; i < n; ++i)
      out.eigenvectors.push_back(detail::field_from_vector(H.grid, es.eigenvectors().col(i)));
  annotate_clusters(out);
  return out;
}

}  // namespace llab
