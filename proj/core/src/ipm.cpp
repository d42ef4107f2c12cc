#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <vector>

#include "swdro/conic.hpp"

// Primal-dual interior-point method on the homogeneous self-dual embedding
//
//   A^T y + G^T z + c tau = 0
//   A x             - b tau = 0
//   G x + s         - h tau = 0
//   kappa + c^T x + b^T y + h^T z = 0,   s in K, z in K, tau, kappa >= 0,
//
// with Nesterov-Todd scaling on the cone blocks and Mehrotra
// predictor-corrector steps.  tau > kappa at convergence recovers the
// optimum; kappa > tau yields an infeasibility or unboundedness certificate.

namespace swdro::detail {

namespace {

struct ConeLayout {
  int n_nonneg;
  std::vector<int> soc_offsets;
  std::vector<int> soc_dims;
  int total;
  int degree;  // orthant size + number of SOC blocks
};

ConeLayout make_layout(const ConeSpec& spec) {
  ConeLayout layout;
  layout.n_nonneg = spec.n_nonneg;
  layout.total = spec.n_nonneg;
  for (int q : spec.soc_dims) {
    layout.soc_offsets.push_back(layout.total);
    layout.soc_dims.push_back(q);
    layout.total += q;
  }
  layout.degree = spec.n_nonneg + static_cast<int>(spec.soc_dims.size());
  return layout;
}

Eigen::VectorXd cone_identity(const ConeLayout& lay) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(lay.total);
  e.head(lay.n_nonneg).setOnes();
  for (size_t k = 0; k < lay.soc_dims.size(); ++k) e[lay.soc_offsets[k]] = 1.0;
  return e;
}

double jdot(const Eigen::Ref<const Eigen::VectorXd>& u) {
  return u[0] * u[0] - u.tail(u.size() - 1).squaredNorm();
}

// Per-cone Nesterov-Todd scaling.  For the orthant W = diag(sqrt(s/z)); for a
// second-order cone W = eta * Wb(v) with the unit hyperbolic vector v
// (jdot(v) = 1) and Wb(v) = [v0, vb^T; vb, I + vb vb^T / (1 + v0)], so that
// Wb(v)^2 = 2 v v^T - J and Wb(v)^{-1} = Wb(Jv) = J Wb(v) J.
struct Scaling {
  Eigen::VectorXd w_diag;                // orthant part
  std::vector<Eigen::VectorXd> soc_v;    // unit hyperbolic vectors
  std::vector<double> soc_eta;
  Eigen::VectorXd lambda;                // scaled point W z = W^{-1} s

  static void apply_wb(const Eigen::VectorXd& v,
                       const Eigen::Ref<const Eigen::VectorXd>& u,
                       Eigen::Ref<Eigen::VectorXd> r, double flip,
                       double scale) {
    const int q = static_cast<int>(v.size());
    const double v0 = v[0];
    const auto vb = v.tail(q - 1);
    const auto ub = u.tail(q - 1);
    const double dot = flip * vb.dot(ub);
    r[0] = scale * (v0 * u[0] + dot);
    r.tail(q - 1) =
        scale * (flip * u[0] * vb + ub + (dot / (1.0 + v0)) * flip * vb);
  }

  Eigen::VectorXd apply(const ConeLayout& lay, const Eigen::VectorXd& u) const {
    Eigen::VectorXd r(u.size());
    r.head(lay.n_nonneg) =
        w_diag.head(lay.n_nonneg).cwiseProduct(u.head(lay.n_nonneg));
    for (size_t k = 0; k < soc_v.size(); ++k) {
      const int off = lay.soc_offsets[k];
      const int q = lay.soc_dims[k];
      apply_wb(soc_v[k], u.segment(off, q), r.segment(off, q), 1.0, soc_eta[k]);
    }
    return r;
  }

  Eigen::VectorXd apply_inverse(const ConeLayout& lay,
                                const Eigen::VectorXd& u) const {
    Eigen::VectorXd r(u.size());
    r.head(lay.n_nonneg) =
        u.head(lay.n_nonneg).cwiseQuotient(w_diag.head(lay.n_nonneg));
    for (size_t k = 0; k < soc_v.size(); ++k) {
      const int off = lay.soc_offsets[k];
      const int q = lay.soc_dims[k];
      apply_wb(soc_v[k], u.segment(off, q), r.segment(off, q), -1.0,
               1.0 / soc_eta[k]);
    }
    return r;
  }
};

bool compute_scaling(const ConeLayout& lay, const Eigen::VectorXd& s,
                     const Eigen::VectorXd& z, Scaling& sc) {
  sc.w_diag.resize(lay.total);
  sc.soc_v.assign(lay.soc_dims.size(), {});
  sc.soc_eta.assign(lay.soc_dims.size(), 0.0);
  sc.lambda.resize(lay.total);
  for (int i = 0; i < lay.n_nonneg; ++i) {
    if (s[i] <= 0 || z[i] <= 0) return false;
    sc.w_diag[i] = std::sqrt(s[i] / z[i]);
    sc.lambda[i] = std::sqrt(s[i] * z[i]);
  }
  for (size_t k = 0; k < lay.soc_dims.size(); ++k) {
    const int off = lay.soc_offsets[k];
    const int q = lay.soc_dims[k];
    auto sk = s.segment(off, q);
    auto zk = z.segment(off, q);
    const double js = jdot(sk);
    const double jz = jdot(zk);
    if (js <= 0 || jz <= 0 || sk[0] <= 0 || zk[0] <= 0) return false;
    const double snorm = std::sqrt(js);
    const double znorm = std::sqrt(jz);
    Eigen::VectorXd a = sk / snorm;
    Eigen::VectorXd b = zk / znorm;
    const double gamma = std::sqrt((1.0 + a.dot(b)) / 2.0);
    if (!(gamma > 0)) return false;
    Eigen::VectorXd Jb(q);
    Jb[0] = b[0];
    Jb.tail(q - 1) = -b.tail(q - 1);
    Eigen::VectorXd v = (a + Jb) / (2.0 * gamma);
    sc.soc_v[k] = v;
    sc.soc_eta[k] = std::pow(js / jz, 0.25);
  }
  sc.lambda = sc.apply(lay, z);
  for (int i = 0; i < lay.n_nonneg; ++i) sc.lambda[i] = std::sqrt(s[i] * z[i]);
  return true;
}

Eigen::VectorXd jordan_product(const ConeLayout& lay, const Eigen::VectorXd& u,
                               const Eigen::VectorXd& w) {
  Eigen::VectorXd r(lay.total);
  r.head(lay.n_nonneg) =
      u.head(lay.n_nonneg).cwiseProduct(w.head(lay.n_nonneg));
  for (size_t k = 0; k < lay.soc_dims.size(); ++k) {
    const int off = lay.soc_offsets[k];
    const int q = lay.soc_dims[k];
    auto uk = u.segment(off, q);
    auto wk = w.segment(off, q);
    r[off] = uk.dot(wk);
    r.segment(off + 1, q - 1) =
        uk[0] * wk.tail(q - 1) + wk[0] * uk.tail(q - 1);
  }
  return r;
}

// Solves lambda o v = d per cone (arrow-matrix solve on SOC blocks).
Eigen::VectorXd jordan_solve(const ConeLayout& lay, const Eigen::VectorXd& lambda,
                             const Eigen::VectorXd& d) {
  Eigen::VectorXd r(lay.total);
  r.head(lay.n_nonneg) =
      d.head(lay.n_nonneg).cwiseQuotient(lambda.head(lay.n_nonneg));
  for (size_t k = 0; k < lay.soc_dims.size(); ++k) {
    const int off = lay.soc_offsets[k];
    const int q = lay.soc_dims[k];
    auto lk = lambda.segment(off, q);
    auto dk = d.segment(off, q);
    const double det = jdot(lk);
    const double v0 = (lk[0] * dk[0] - lk.tail(q - 1).dot(dk.tail(q - 1))) / det;
    r[off] = v0;
    r.segment(off + 1, q - 1) = (dk.tail(q - 1) - v0 * lk.tail(q - 1)) / lk[0];
  }
  return r;
}

// Largest alpha in [0, cap] with u + alpha du staying in the cone.
double max_step(const ConeLayout& lay, const Eigen::VectorXd& u,
                const Eigen::VectorXd& du, double cap) {
  double alpha = cap;
  for (int i = 0; i < lay.n_nonneg; ++i) {
    if (du[i] < 0) alpha = std::min(alpha, -u[i] / du[i]);
  }
  for (size_t k = 0; k < lay.soc_dims.size(); ++k) {
    const int off = lay.soc_offsets[k];
    const int q = lay.soc_dims[k];
    auto uk = u.segment(off, q);
    auto dk = du.segment(off, q);
    // roots of jdot(u + alpha d) = 0 plus the linear head positivity
    const double a = jdot(dk);
    const double b = 2.0 * (uk[0] * dk[0] - uk.tail(q - 1).dot(dk.tail(q - 1)));
    const double c = jdot(uk);
    double bound = cap;
    if (std::abs(a) < 1e-14) {
      if (b < -1e-14) bound = -c / b;
    } else {
      const double disc = b * b - 4 * a * c;
      if (disc >= 0) {
        const double sq = std::sqrt(disc);
        const double r1 = (-b - sq) / (2 * a);
        const double r2 = (-b + sq) / (2 * a);
        for (double r : {std::min(r1, r2), std::max(r1, r2)}) {
          if (r > 1e-14) {
            bound = std::min(bound, r);
            break;
          }
        }
      }
    }
    if (dk[0] < 0) bound = std::min(bound, -uk[0] / dk[0]);
    alpha = std::min(alpha, bound);
  }
  return alpha;
}

}  // namespace

IpmResult ipm_solve(const IpmProblem& problem, const SolveOptions& options) {
  const ConeLayout lay = make_layout(problem.cone);
  const int n = static_cast<int>(problem.c.size());
  const int me = static_cast<int>(problem.b.size());
  const int mi = lay.total;
  const double tol = options.tolerance;

  const Eigen::SparseMatrix<double>& A = problem.A;
  const Eigen::SparseMatrix<double>& G = problem.G;
  const Eigen::VectorXd& b = problem.b;
  const Eigen::VectorXd& h = problem.h;
  const Eigen::VectorXd& c = problem.c;

  IpmResult out;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(me);
  Eigen::VectorXd e = cone_identity(lay);
  Eigen::VectorXd s = e, z = e;
  double tau = 1.0, kappa = 1.0;

  // best near-feasible iterate, for a reduced-accuracy exit when the final
  // push to `tol` degenerates (e.g. cone-apex optima)
  struct Best {
    double metric = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x, y, z, s;
    double pres = 0, dres = 0, relgap = 0, pobj = 0, dobj = 0;
  } best;

  const int dim = n + me + mi;
  const double reg = 1e-8;

  // KKT matrix [[reg, A^T, G^T], [A, -reg, 0], [G, 0, -W^2 - reg]].
  // The sparsity pattern is fixed; only the W^2 values change per iteration.
  std::vector<Eigen::Triplet<double>> fixed_entries;
  for (int k = 0; k < A.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
      fixed_entries.emplace_back(n + it.row(), it.col(), it.value());
      fixed_entries.emplace_back(it.col(), n + it.row(), it.value());
    }
  }
  for (int k = 0; k < G.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(G, k); it; ++it) {
      fixed_entries.emplace_back(n + me + it.row(), it.col(), it.value());
      fixed_entries.emplace_back(it.col(), n + me + it.row(), it.value());
    }
  }
  for (int i = 0; i < n; ++i) fixed_entries.emplace_back(i, i, reg);
  for (int i = 0; i < me; ++i) fixed_entries.emplace_back(n + i, n + i, -reg);

  auto assemble = [&](const Scaling& sc) {
    std::vector<Eigen::Triplet<double>> entries = fixed_entries;
    for (int i = 0; i < lay.n_nonneg; ++i) {
      const double w2 = sc.w_diag[i] * sc.w_diag[i];
      entries.emplace_back(n + me + i, n + me + i, -w2 - reg);
    }
    for (size_t k = 0; k < lay.soc_dims.size(); ++k) {
      const int off = n + me + lay.soc_offsets[k];
      const int q = lay.soc_dims[k];
      const auto& v = sc.soc_v[k];
      // W^2 = eta^2 (2 v v^T - J)
      Eigen::MatrixXd W2 = 2.0 * v * v.transpose();
      W2(0, 0) -= 1.0;
      for (int i = 1; i < q; ++i) W2(i, i) += 1.0;
      W2 *= sc.soc_eta[k] * sc.soc_eta[k];
      for (int i = 0; i < q; ++i) {
        for (int j = 0; j < q; ++j) {
          double val = -W2(i, j);
          if (i == j) val -= reg;
          entries.emplace_back(off + i, off + j, val);
        }
      }
    }
    Eigen::SparseMatrix<double> K(dim, dim);
    K.setFromTriplets(entries.begin(), entries.end());
    return K;
  };

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Upper> ldlt;
  bool analyzed = false;

  auto kkt_multiply = [&](const Scaling& sc, const Eigen::VectorXd& u) {
    // product with the unregularized KKT matrix, for iterative refinement
    Eigen::VectorXd r(dim);
    Eigen::VectorXd ux = u.head(n);
    Eigen::VectorXd uy = u.segment(n, me);
    Eigen::VectorXd uz = u.tail(mi);
    r.head(n) = A.transpose() * uy + G.transpose() * uz;
    r.segment(n, me) = A * ux;
    r.tail(mi) = G * ux - sc.apply(lay, sc.apply(lay, uz));
    return r;
  };

  auto kkt_solve = [&](const Scaling& sc, const Eigen::VectorXd& rhs) {
    Eigen::VectorXd u = ldlt.solve(rhs);
    double prev_norm = std::numeric_limits<double>::infinity();
    for (int pass = 0; pass < 6; ++pass) {
      Eigen::VectorXd resid = rhs - kkt_multiply(sc, u);
      const double rnorm = resid.lpNorm<Eigen::Infinity>();
      if (rnorm >= prev_norm || rnorm < 1e-14) break;
      prev_norm = rnorm;
      u += ldlt.solve(resid);
    }
    return u;
  };

  const double bnorm = std::max(1.0, b.size() ? b.lpNorm<Eigen::Infinity>() : 0.0);
  const double hnorm = std::max(1.0, h.size() ? h.lpNorm<Eigen::Infinity>() : 0.0);
  const double cnorm = std::max(1.0, c.size() ? c.lpNorm<Eigen::Infinity>() : 0.0);

  double mu0 = (s.dot(z) + tau * kappa) / (lay.degree + 1);

  for (int iter = 0; iter < options.iteration_limit; ++iter) {
    out.iterations = iter;

    // residuals of the homogeneous model
    Eigen::VectorXd rx = A.transpose() * y + G.transpose() * z + c * tau;
    Eigen::VectorXd ry = A * x - b * tau;
    Eigen::VectorXd rz = G * x + s - h * tau;
    const double rtau = kappa + c.dot(x) + b.dot(y) + h.dot(z);
    const double mu = (s.dot(z) + tau * kappa) / (lay.degree + 1);

    // convergence checks on the de-homogenized point
    const double pcost = c.dot(x) / tau;
    const double dcost = -(b.dot(y) + h.dot(z)) / tau;
    const double pres =
        std::max(me ? (ry / tau).lpNorm<Eigen::Infinity>() / bnorm : 0.0,
                 (rz / tau).lpNorm<Eigen::Infinity>() / hnorm);
    const double dres = (rx / tau).lpNorm<Eigen::Infinity>() / cnorm;
    const double gap = s.dot(z) / (tau * tau);
    const double relgap = gap / std::max({1.0, std::abs(pcost), std::abs(dcost)});

    if (std::getenv("SWDRO_IPM_TRACE")) {
      const double pgain = -c.dot(x);
      const double ray_res =
          std::max(me ? (A * x).lpNorm<Eigen::Infinity>() : 0.0,
                   (G * x + s).lpNorm<Eigen::Infinity>());
      std::fprintf(stderr,
                   "it=%3d mu=%9.2e tau=%9.2e kap=%9.2e pres=%9.2e dres=%9.2e "
                   "gap=%9.2e pgain=%9.2e rayres=%9.2e\n",
                   iter, mu, tau, kappa, pres, dres, relgap, pgain, ray_res);
    }
    const double metric = std::max({pres, dres, relgap});
    if (metric < best.metric) {
      best.metric = metric;
      best.x = x / tau;
      best.y = y / tau;
      best.z = z / tau;
      best.s = s / tau;
      best.pres = pres;
      best.dres = dres;
      best.relgap = relgap;
      best.pobj = pcost;
      best.dobj = dcost;
    }

    if (pres <= tol && dres <= tol && relgap <= tol) {
      out.status = SolveStatus::Optimal;
      out.x = x / tau;
      out.y = y / tau;
      out.z = z / tau;
      out.s = s / tau;
      out.primal_obj = pcost;
      out.dual_obj = dcost;
      out.primal_residual = pres;
      out.dual_residual = dres;
      out.relative_gap = relgap;
      return out;
    }

    // certificates of primal infeasibility / unboundedness; these use their
    // own tolerance since the homogeneous iterates approach a certificate
    // direction more slowly than an optimum
    auto check_certificates = [&](double ctol) -> bool {
      const double dual_gain = -(b.dot(y) + h.dot(z));
      if (dual_gain > 1e-10) {
        const double inf_res =
            (A.transpose() * y + G.transpose() * z).lpNorm<Eigen::Infinity>();
        if (inf_res / dual_gain <= ctol * cnorm) {
          out.status = SolveStatus::Infeasible;
          out.y = y / dual_gain;
          out.z = z / dual_gain;
          return true;
        }
      }
      const double primal_gain = -c.dot(x);
      if (primal_gain > 1e-10) {
        const double ray_res =
            std::max(me ? (A * x).lpNorm<Eigen::Infinity>() : 0.0,
                     (G * x + s).lpNorm<Eigen::Infinity>());
        if (ray_res / primal_gain <= ctol * std::max(bnorm, hnorm)) {
          out.status = SolveStatus::Unbounded;
          out.x = x / primal_gain;
          out.s = s / primal_gain;
          return true;
        }
      }
      return false;
    };
    if (check_certificates(std::max(tol, 1e-8))) {
      out.iterations = iter;
      return out;
    }

    // reduced-accuracy exit: the best iterate already meets the contract
    // (residuals and gap at or below 1e-8 relative) even if `tol` is tighter;
    // a degenerating iterate may instead be an excellent certificate direction
    auto degraded_exit = [&](const std::string& why) -> IpmResult {
      const double accept = std::max(tol, 1e-8);
      if (best.metric <= accept) {
        out.status = SolveStatus::Optimal;
        out.x = best.x;
        out.y = best.y;
        out.z = best.z;
        out.s = best.s;
        out.primal_obj = best.pobj;
        out.dual_obj = best.dobj;
        out.primal_residual = best.pres;
        out.dual_residual = best.dres;
        out.relative_gap = best.relgap;
        return out;
      }
      if (check_certificates(1e-6)) return out;
      fail(ErrorKind::NumericalFailure, why);
    };

    if (mu < 1e-14 * mu0 && tau < 1e-10) {
      return degraded_exit("interior point iterates collapsed without a certificate");
    }

    Scaling sc;
    if (!compute_scaling(lay, s, z, sc)) {
      return degraded_exit("iterate left the cone interior");
    }

    Eigen::SparseMatrix<double> K = assemble(sc);
    if (!analyzed) {
      ldlt.analyzePattern(K);
      analyzed = true;
    }
    ldlt.factorize(K);
    if (ldlt.info() != Eigen::Success) {
      return degraded_exit("KKT factorization failed");
    }

    // constant-column solve, shared by predictor and corrector
    Eigen::VectorXd rhs2(dim);
    rhs2.head(n) = -c;
    rhs2.segment(n, me) = b;
    rhs2.tail(mi) = h;
    Eigen::VectorXd u2 = kkt_solve(sc, rhs2);

    // Newton equations with target damping gamma:
    //   A^T dy + G^T dz + c dtau = -(1-g) rx
    //   A dx - b dtau            = -(1-g) ry
    //   G dx + ds - h dtau       = -(1-g) rz
    //   dkappa + c.dx + b.dy + h.dz = -(1-g) rtau
    //   lambda o (W dz + W^{-1} ds) = ds_comp,   kappa dtau + tau dkappa = dk_comp
    // Eliminating ds and dkappa leaves K [dx;dy;dz] = rhs1 + dtau * [-c;b;h].
    auto direction = [&](double gamma, const Eigen::VectorXd& ds_comp,
                         double dkappa_comp) {
      Eigen::VectorXd wlds = sc.apply(lay, jordan_solve(lay, sc.lambda, ds_comp));
      Eigen::VectorXd rhs1(dim);
      rhs1.head(n) = -(1 - gamma) * rx;
      rhs1.segment(n, me) = -(1 - gamma) * ry;
      rhs1.tail(mi) = -(1 - gamma) * rz - wlds;
      Eigen::VectorXd u1 = kkt_solve(sc, rhs1);

      const double dot1 =
          c.dot(u1.head(n)) + b.dot(u1.segment(n, me)) + h.dot(u1.tail(mi));
      const double dot2 =
          c.dot(u2.head(n)) + b.dot(u2.segment(n, me)) + h.dot(u2.tail(mi));
      const double denom = kappa / tau - dot2;
      if (denom == 0.0) {
        fail(ErrorKind::NumericalFailure, "singular tau pivot in KKT solve");
      }
      const double dtau =
          ((1 - gamma) * rtau + dkappa_comp / tau + dot1) / denom;

      Eigen::VectorXd dx = u1.head(n) + dtau * u2.head(n);
      Eigen::VectorXd dy = u1.segment(n, me) + dtau * u2.segment(n, me);
      Eigen::VectorXd dz = u1.tail(mi) + dtau * u2.tail(mi);
      Eigen::VectorXd ds =
          sc.apply(lay, jordan_solve(lay, sc.lambda, ds_comp) - sc.apply(lay, dz));
      const double dkappa = (dkappa_comp - kappa * dtau) / tau;
      return std::make_tuple(dx, dy, dz, ds, dtau, dkappa);
    };

    // predictor
    Eigen::VectorXd ds_aff = -jordan_product(lay, sc.lambda, sc.lambda);
    auto [dx_a, dy_a, dz_a, ds_a, dtau_a, dkappa_a] =
        direction(0.0, ds_aff, -tau * kappa);

    double alpha = max_step(lay, s, ds_a, 1.0);
    alpha = std::min(alpha, max_step(lay, z, dz_a, 1.0));
    if (dtau_a < 0) alpha = std::min(alpha, -tau / dtau_a);
    if (dkappa_a < 0) alpha = std::min(alpha, -kappa / dkappa_a);

    const double mu_aff =
        ((s + alpha * ds_a).dot(z + alpha * dz_a) +
         (tau + alpha * dtau_a) * (kappa + alpha * dkappa_a)) /
        (lay.degree + 1);
    double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
    sigma = std::clamp(sigma, 0.0, 1.0);

    // corrector with the Mehrotra second-order term
    Eigen::VectorXd corr = jordan_product(
        lay, sc.apply_inverse(lay, ds_a), sc.apply(lay, dz_a));
    Eigen::VectorXd ds_comb =
        -jordan_product(lay, sc.lambda, sc.lambda) + sigma * mu * e - corr;
    const double dkappa_comb = -tau * kappa + sigma * mu - dtau_a * dkappa_a;
    auto [dx, dy, dz, ds, dtau, dkappa] = direction(sigma, ds_comb, dkappa_comb);

    double step = max_step(lay, s, ds, 1.0 / 0.99);
    step = std::min(step, max_step(lay, z, dz, 1.0 / 0.99));
    if (dtau < 0) step = std::min(step, -tau / dtau);
    if (dkappa < 0) step = std::min(step, -kappa / dkappa);
    step = std::min(1.0, 0.99 * step);

    // the quadratic root in max_step can overshoot; back off until both cone
    // iterates are strictly interior
    auto interior = [&](const Eigen::VectorXd& u) {
      for (int i = 0; i < lay.n_nonneg; ++i) {
        if (!(u[i] > 0)) return false;
      }
      for (size_t k = 0; k < lay.soc_dims.size(); ++k) {
        auto uk = u.segment(lay.soc_offsets[k], lay.soc_dims[k]);
        if (!(uk[0] > 0) || !(jdot(uk) > 0)) return false;
      }
      return true;
    };
    while (step > 1e-13 &&
           (!interior(s + step * ds) || !interior(z + step * dz) ||
            !(tau + step * dtau > 0) || !(kappa + step * dkappa > 0))) {
      step *= 0.9;
    }
    if (step <= 1e-13) {
      return degraded_exit("step length collapsed");
    }

    x += step * dx;
    y += step * dy;
    z += step * dz;
    s += step * ds;
    tau += step * dtau;
    kappa += step * dkappa;
  }

  // iteration limit: accept the best iterate when it meets the contract
  const double accept = std::max(tol, 1e-8);
  if (best.metric <= accept) {
    out.status = SolveStatus::Optimal;
    out.x = best.x;
    out.y = best.y;
    out.z = best.z;
    out.s = best.s;
    out.primal_obj = best.pobj;
    out.dual_obj = best.dobj;
    out.primal_residual = best.pres;
    out.dual_residual = best.dres;
    out.relative_gap = best.relgap;
    return out;
  }
  out.status = SolveStatus::IterationLimit;
  out.x = x / tau;
  out.y = y / tau;
  out.z = z / tau;
  out.s = s / tau;
  out.primal_obj = c.dot(x) / tau;
  out.dual_obj = -(b.dot(y) + h.dot(z)) / tau;
  return out;
}

}  // namespace swdro::detail
