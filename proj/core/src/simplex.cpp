#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "swdro/conic.hpp"

namespace swdro::detail {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-9;

}  // namespace

// Two-phase primal simplex with an explicitly maintained basis inverse
// (product-form updates, periodic refactorization).  Dantzig pricing with a
// switch to Bland's rule after a run of degenerate pivots keeps the method
// deterministic and cycle-free.
SimplexResult simplex_solve(const StandardFormLP& lp, int iteration_limit,
                            const std::vector<int>* initial_basis) {
  const int m = static_cast<int>(lp.A.rows());
  const int n = static_cast<int>(lp.A.cols());

  SimplexResult out;
  if (m == 0) {
    out.status = SolveStatus::Optimal;
    out.x = Eigen::VectorXd::Zero(n);
    out.dual = Eigen::VectorXd::Zero(0);
    for (int j = 0; j < n; ++j) {
      if (lp.c[j] < -kPivotTol) {
        out.status = SolveStatus::Unbounded;
        out.ray = Eigen::VectorXd::Zero(n);
        out.ray[j] = 1.0;
        return out;
      }
    }
    out.value = 0.0;
    return out;
  }

  // Work matrix with artificials appended; rows flipped so b >= 0.
  Eigen::MatrixXd A(m, n + m);
  Eigen::VectorXd b = lp.b;
  A.leftCols(n) = lp.A;
  A.rightCols(m).setIdentity();
  for (int i = 0; i < m; ++i) {
    if (b[i] < 0) {
      b[i] = -b[i];
      A.row(i).head(n) = -lp.A.row(i);
    }
  }

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;
  Eigen::MatrixXd Binv = Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd xB = b;

  auto refactorize = [&]() {
    Eigen::MatrixXd B(m, m);
    for (int i = 0; i < m; ++i) B.col(i) = A.col(basis[i]);
    Binv = B.partialPivLu().inverse();
    xB = Binv * b;
  };

  int total_iters = 0;
  int degenerate_run = 0;

  // phase 1 minimizes the artificial mass, phase 2 the real objective
  // restricted to non-artificial entering columns.
  auto run_phase = [&](const Eigen::VectorXd& cost, bool phase2) -> SolveStatus {
    const int n_cols = phase2 ? n : n + m;
    while (true) {
      if (++total_iters > iteration_limit) return SolveStatus::IterationLimit;
      if (total_iters % 128 == 0) refactorize();

      Eigen::VectorXd cB(m);
      for (int i = 0; i < m; ++i) cB[i] = cost[basis[i]];
      Eigen::VectorXd y = Binv.transpose() * cB;

      const bool bland = degenerate_run > 50 + 4 * m;
      int enter = -1;
      double best = -kPivotTol;
      for (int j = 0; j < n_cols; ++j) {
        const double rc = cost[j] - y.dot(A.col(j));
        if (rc < -kPivotTol) {
          if (bland) {
            enter = j;
            break;
          }
          if (rc < best) {
            best = rc;
            enter = j;
          }
        }
      }
      if (enter < 0) return SolveStatus::Optimal;

      // entering column direction in the basis
      Eigen::VectorXd d = Binv * A.col(enter);
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        if (d[i] > kPivotTol) {
          const double ratio = xB[i] / d[i];
          if (ratio < best_ratio - kPivotTol ||
              (ratio < best_ratio + kPivotTol &&
               (leave < 0 || basis[i] < basis[leave]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) {
        Eigen::VectorXd ray = Eigen::VectorXd::Zero(n + m);
        ray[enter] = 1.0;
        for (int i = 0; i < m; ++i) ray[basis[i]] -= d[i];
        out.ray = ray.head(n);
        return SolveStatus::Unbounded;
      }

      degenerate_run = (best_ratio <= kFeasTol) ? degenerate_run + 1 : 0;

      // product-form update of Binv and xB
      const double piv = d[leave];
      Eigen::RowVectorXd pivot_row = Binv.row(leave) / piv;
      for (int i = 0; i < m; ++i) {
        if (i != leave && std::abs(d[i]) > 0) Binv.row(i) -= d[i] * pivot_row;
      }
      Binv.row(leave) = pivot_row;
      basis[leave] = enter;
      xB = Binv * b;
      for (int i = 0; i < m; ++i) {
        if (xB[i] < 0 && xB[i] > -kFeasTol) xB[i] = 0;
      }
    }
  };

  if (initial_basis != nullptr) {
    require(static_cast<int>(initial_basis->size()) == m,
            ErrorKind::InvalidArgument, "initial basis must cover every row");
    basis = *initial_basis;
    refactorize();
    for (int i = 0; i < m; ++i) {
      require(xB[i] >= -1e-9, ErrorKind::InvalidArgument,
              "initial basis is not primal feasible");
      if (xB[i] < 0) xB[i] = 0;
    }
  } else {
    // Phase 1.
    Eigen::VectorXd cost1 = Eigen::VectorXd::Zero(n + m);
    cost1.tail(m).setOnes();
    SolveStatus st1 = run_phase(cost1, false);
    if (st1 == SolveStatus::IterationLimit) {
      out.status = st1;
      out.iterations = total_iters;
      return out;
    }
    double art_mass = 0.0;
    for (int i = 0; i < m; ++i) {
      if (basis[i] >= n) art_mass += xB[i];
    }
    if (art_mass > 1e-7) {
      out.status = SolveStatus::Infeasible;
      out.iterations = total_iters;
      return out;
    }
    // Pivot out basic artificials sitting at zero where possible; rows with
    // no eligible column are redundant and keep their zero artificial.
    refactorize();
    for (int i = 0; i < m; ++i) {
      if (basis[i] < n) continue;
      Eigen::RowVectorXd row = Binv.row(i) * A.leftCols(n);
      int enter = -1;
      for (int j = 0; j < n; ++j) {
        if (std::abs(row[j]) > 1e-8) {
          enter = j;
          break;
        }
      }
      if (enter < 0) continue;
      Eigen::VectorXd d = Binv * A.col(enter);
      const double piv = d[i];
      Eigen::RowVectorXd pivot_row = Binv.row(i) / piv;
      for (int r = 0; r < m; ++r) {
        if (r != i && std::abs(d[r]) > 0) Binv.row(r) -= d[r] * pivot_row;
      }
      Binv.row(i) = pivot_row;
      basis[i] = enter;
    }
    xB = Binv * b;
  }

  // Phase 2.
  Eigen::VectorXd cost2 = Eigen::VectorXd::Zero(n + m);
  cost2.head(n) = lp.c;
  degenerate_run = 0;
  SolveStatus st = run_phase(cost2, true);
  out.status = st;
  out.iterations = total_iters;
  if (st == SolveStatus::Optimal || st == SolveStatus::Unbounded) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i) {
      if (basis[i] < n) x[basis[i]] = std::max(0.0, xB[i]);
    }
    out.x = x;
    if (st == SolveStatus::Optimal) {
      out.value = lp.c.dot(x);
      Eigen::VectorXd cB(m);
      for (int i = 0; i < m; ++i) cB[i] = cost2[basis[i]];
      Eigen::VectorXd y = Binv.transpose() * cB;
      // undo the phase-0 row sign flips
      for (int i = 0; i < m; ++i) {
        if (lp.b[i] < 0) y[i] = -y[i];
      }
      out.dual = y;
    }
  }
  return out;
}

}  // namespace swdro::detail
