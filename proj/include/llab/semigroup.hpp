#pragma once

#include "llab/diagnostics.hpp"
#include "llab/eigensolver.hpp"

namespace llab {

enum class Scheme { ExponentialEuler, Strang };

struct EvolutionConfig {
  double t_final = 1.0;
  int substeps = 16;
  Scheme scheme = Scheme::ExponentialEuler;
  bool record_norms = false;
  double step_tol = 1e-8;     // local error target per macro step
  int max_halvings = 16;
};

struct EvolveReport {
  std::vector<double> norms;       // ||v|| after each macro step, if recorded
  int substeps_used = 0;           // finest effective substep count
  double max_local_error = 0.0;
};

namespace detail {

/// The non-stiff part of the v-equation in the mild form: N(v) = F1 . grad v
/// + F2 v, realized through the exact lattice conjugation
///   N(v) = e^{h} H_ansatz(e^{-h} v) + Delta_disc v,
/// which keeps the evolved map symmetric up to stepping error. The explicit
/// staggered F1/F2 fields appear in the diagnostics module instead.
class MildNonstiff {
 public:
  MildNonstiff(const Grid& g, const MagneticPotential& A, const Model& m)
      : H_(assemble_ansatz(g, A, m.h, m.z)), eh_(g), emh_(g) {
    const int N = g.N();
    for (int j = 1; j <= N; ++j)
      for (int k = 1; k <= N; ++k) {
        eh_(j, k) = std::exp(m.h(j, k));
        emh_(j, k) = std::exp(-m.h(j, k));
      }
  }

  const MagneticOperator& generator() const { return H_; }
  const ScalarField& exp_h() const { return eh_; }
  const ScalarField& exp_mh() const { return emh_; }

  ComplexField operator()(const ComplexField& v) const {
    ComplexField u(v.grid());
    auto uu = u.values();
    auto vv = v.values();
    auto em = emh_.values();
    for (std::size_t i = 0; i < uu.size(); ++i) uu[i] = em[i] * vv[i];
    ComplexField y = apply(H_, u);
    ComplexField lap = laplacian_5pt(v);
    auto yy = y.values();
    auto ep = eh_.values();
    auto ll = lap.values();
    for (std::size_t i = 0; i < yy.size(); ++i) yy[i] = ep[i] * yy[i] + ll[i];
    return y;
  }

 private:
  MagneticOperator H_;
  ScalarField eh_, emh_;
};

/// One step of the exponential integrator on the Duhamel form,
///   v+ = K_dt v - dt K_{dt/2} N(v_mid),
/// with the midpoint value corrected once (exponential midpoint rule).
inline ComplexField mild_step(const MildNonstiff& Nl, const ComplexField& v, double dt,
                              Scheme scheme) {
  ComplexField p = heat_apply(0.5 * dt, v);
  ComplexField rhs = p;
  if (scheme == Scheme::ExponentialEuler) {
    ComplexField n1 = Nl(p);
    ComplexField vmid = p;
    auto vm = vmid.values();
    auto nn = n1.values();
    for (std::size_t i = 0; i < vm.size(); ++i) vm[i] -= 0.5 * dt * nn[i];
    ComplexField n2 = Nl(vmid);
    auto rr = rhs.values();
    auto n2v = n2.values();
    for (std::size_t i = 0; i < rr.size(); ++i) rr[i] -= dt * n2v[i];
  } else {
    ComplexField n1 = Nl(p);
    auto rr = rhs.values();
    auto nn = n1.values();
    for (std::size_t i = 0; i < rr.size(); ++i) rr[i] -= dt * nn[i];
  }
  return heat_apply(0.5 * dt, rhs);
}

inline double rel_diff(const ComplexField& a, const ComplexField& b) {
  double num = 0.0, den = 0.0;
  auto va = a.values();
  auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) {
    num += std::norm(va[i] - vb[i]);
    den += std::norm(vb[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace detail

/// Evolves the mild-form PDE and returns R_t g = e^{-h} v(t), v(0) = g e^h.
/// Each macro step is advanced with step-doubling error control: the step is
/// halved until the doubling estimate meets cfg.step_tol, the Richardson
/// combination of the two results is kept, and a step that cannot reach 1e-6
/// relative within cfg.max_halvings is rejected with the required substep
/// count in the message.
inline ComplexField evolve(const Grid& g, const MagneticPotential& A, const Model& m,
                           const ComplexField& g0, const EvolutionConfig& cfg,
                           EvolveReport* report = nullptr) {
  if (g0.grid() != g || A.grid != g || m.grid != g)
    throw std::invalid_argument("evolve: grid mismatch");
  if (cfg.substeps < 1 || !(cfg.t_final > 0.0))
    throw std::invalid_argument("evolve: need substeps >= 1 and t_final > 0");

  detail::MildNonstiff Nl(g, A, m);
  ComplexField v(g);
  {
    auto vv = v.values();
    auto gg = g0.values();
    auto ep = Nl.exp_h().values();
    for (std::size_t i = 0; i < vv.size(); ++i) vv[i] = ep[i] * gg[i];
  }

  const double dt0 = cfg.t_final / cfg.substeps;
  int finest = cfg.substeps;
  double max_err = 0.0;
  int pieces_carry = 1;
  for (int step = 0; step < cfg.substeps; ++step) {
    int pieces = pieces_carry;
    double dt = dt0 / pieces;
    int halvings = 0;
    double err = 0.0;
    ComplexField accepted = v;
    while (true) {
      // Advance dt0 as `pieces` sub-steps, and the same with doubled
      // resolution for the error estimate.
      ComplexField coarse = v;
      for (int p = 0; p < pieces; ++p) coarse = detail::mild_step(Nl, coarse, dt, cfg.scheme);
      ComplexField fine = v;
      for (int p = 0; p < 2 * pieces; ++p) fine = detail::mild_step(Nl, fine, 0.5 * dt, cfg.scheme);
      err = detail::rel_diff(coarse, fine);
      if (err <= cfg.step_tol || halvings >= cfg.max_halvings) {
        // Richardson combination of the second-order pair.
        accepted = fine;
        auto aa = accepted.values();
        auto cc = coarse.values();
        for (std::size_t i = 0; i < aa.size(); ++i) aa[i] += (aa[i] - cc[i]) / 3.0;
        break;
      }
      dt *= 0.5;
      pieces *= 2;
      ++halvings;
    }
    if (err > 1e-6) {
      throw std::runtime_error(
          "evolve: step error " + std::to_string(err) + " above 1e-6 after max halvings; "
          "need at least " + std::to_string(cfg.substeps * pieces * 4) + " substeps");
    }
    max_err = std::max(max_err, err);
    finest = std::max(finest, cfg.substeps * pieces * 2);
    v = accepted;
    // Carry the resolution forward; relax slowly when comfortably accurate.
    pieces_carry = pieces;
    if (err < 0.05 * cfg.step_tol && pieces_carry > 1) pieces_carry /= 2;
    if (report && cfg.record_norms) report->norms.push_back(l2_norm(v));
  }

  ComplexField out(g);
  auto oo = out.values();
  auto vv = v.values();
  auto em = Nl.exp_mh().values();
  for (std::size_t i = 0; i < oo.size(); ++i) oo[i] = em[i] * vv[i];
  if (report) {
    report->substeps_used = finest;
    report->max_local_error = max_err;
  }
  return out;
}

/// Picks the eigenvalue-extraction time so that e^{-t lambda_1} stays well
/// inside double range.
inline double choose_semigroup_time(double lambda1_estimate) {
  return std::min(1.0, 5.0 / std::max(1.0, std::abs(lambda1_estimate)));
}

/// Lowest-k eigenvalues of the generator through the semigroup: block power
/// iteration with orthonormalization on g -> R_t g, Ritz values mu mapped by
/// lambda = -(1/t) log mu. Residuals are reported against the Ansatz
/// assembly of the generator.
inline SpectrumResult semigroup_eigs(const Grid& g, const MagneticPotential& A,
                                     const Model& m, double t, int k,
                                     const EvolutionConfig& cfg_in = {},
                                     double ritz_tol = 1e-10, int max_sweeps = 60) {
  using detail::MatrixXcd;
  using detail::VectorXd;
  if (!(t > 0.0)) throw std::invalid_argument("semigroup_eigs: need t > 0");
  EvolutionConfig cfg = cfg_in;
  cfg.t_final = t;

  const std::size_t n = g.n_sites();
  const int nb = std::min<int>(static_cast<int>(n), k + 2);
  MatrixXcd X(n, nb);
  for (int i = 0; i < nb; ++i)
    X.col(i) = detail::random_vector(n, rng::derive(777, 0x5e6aull), i);
  detail::orthonormalize(X);

  Eigen::SelfAdjointEigenSolver<MatrixXcd> es;
  VectorXd mu_prev = VectorXd::Zero(nb);
  MatrixXcd Y(n, nb);
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    for (int i = 0; i < nb; ++i) {
      ComplexField xi(g);
      std::copy(X.col(i).data(), X.col(i).data() + n, xi.data());
      ComplexField yi = evolve(g, A, m, xi, cfg);
      std::copy(yi.data(), yi.data() + n, Y.col(i).data());
    }
    MatrixXcd G = X.adjoint() * Y;
    es.compute(0.5 * (G + G.adjoint()));
    // Ascending eigenvalues of R_t: the top ones are the wanted mu.
    VectorXd mu = es.eigenvalues().reverse();
    MatrixXcd C = es.eigenvectors().rowwise().reverse();
    X = Y * C;  // power step in the Ritz basis
    detail::orthonormalize(X);
    bool settled = sweep > 0;
    for (int i = 0; i < k && settled; ++i)
      if (std::abs(mu[i] - mu_prev[i]) > ritz_tol * std::max(std::abs(mu[i]), 1e-300))
        settled = false;
    mu_prev = mu;
    if (settled) break;
  }

  // Final Ritz extraction on the orthonormal block.
  for (int i = 0; i < nb; ++i) {
    ComplexField xi(g);
    std::copy(X.col(i).data(), X.col(i).data() + n, xi.data());
    ComplexField yi = evolve(g, A, m, xi, cfg);
    std::copy(yi.data(), yi.data() + n, Y.col(i).data());
  }
  MatrixXcd G = X.adjoint() * Y;
  es.compute(0.5 * (G + G.adjoint()));
  VectorXd mu = es.eigenvalues().reverse();
  MatrixXcd C = es.eigenvectors().rowwise().reverse();
  MatrixXcd Xr = X * C;

  SpectrumResult out;
  out.provenance.solver = "semigroup";
  out.provenance.N = g.N();
  out.provenance.L = g.L();
  out.provenance.iterations = sweep;
  for (int i = 0; i < k; ++i) {
    if (!(mu[i] > 0.0))
      throw std::runtime_error("semigroup_eigs: non-positive Ritz value of R_t, "
                               "evolution accuracy insufficient at mu = " + std::to_string(mu[i]));
  }
  MagneticOperator Ha = assemble_ansatz(g, A, m.h, m.z);
  detail::VectorXcd hx(n);
  out.eigenvalues.resize(k);
  out.residuals.resize(k);
  for (int i = 0; i < k; ++i) {
    out.eigenvalues[i] = -std::log(mu[i]) / t;
    detail::VectorXcd xi = Xr.col(i);
    detail::apply_op(Ha, xi, hx);
    out.residuals[i] = (hx - out.eigenvalues[i] * xi).norm();
    out.eigenvectors.push_back(detail::field_from_vector(g, xi));
  }
  annotate_clusters(out);
  out.converged = sweep < max_sweeps;
  return out;
}

struct GrowthBoundPoint {
  double t = 0.0;
  double norm = 0.0;     // ||R_t|| by power iteration
  double bound = 0.0;    // M_h e^{omega t}
};

struct GrowthBoundReport {
  std::vector<GrowthBoundPoint> points;
  DiagnosticsBundle diag;
  double slack = 0.0;    // max over points of log norm - log bound
};

/// Estimates ||R_t|| over a time ladder and compares against the
/// M_h e^{omega t} envelope from the diagnostics bundle.
inline GrowthBoundReport growth_bound_check(const Grid& g, const MagneticPotential& A,
                                            const Model& m, const std::vector<double>& ts,
                                            int sweeps = 12) {
  GrowthBoundReport rep;
  rep.diag = diagnostics(g, A, m);
  const std::size_t n = g.n_sites();
  for (double t : ts) {
    GrowthBoundPoint pt;
    pt.t = t;
    pt.bound = rep.diag.m_h * std::exp(rep.diag.omega * t);
    if (t == 0.0) {
      pt.norm = 1.0;
    } else {
      EvolutionConfig cfg;
      cfg.t_final = t;
      detail::VectorXcd x = detail::random_vector(n, 31337, 0).normalized();
      double mu = 0.0;
      for (int s = 0; s < sweeps; ++s) {
        ComplexField xi(g);
        std::copy(x.data(), x.data() + n, xi.data());
        ComplexField yi = evolve(g, A, m, xi, cfg);
        detail::VectorXcd y(n);
        std::copy(yi.data(), yi.data() + n, y.data());
        mu = y.norm();
        x = y / mu;
      }
      pt.norm = mu;
    }
    rep.slack = std::max(rep.slack, std::log(std::max(pt.norm, 1e-300)) - std::log(pt.bound));
    rep.points.push_back(pt);
  }
  return rep;
}

}  // namespace llab
