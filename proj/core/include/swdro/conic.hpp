#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>
#include <string>
#include <vector>

#include "swdro/errors.hpp"

namespace swdro {

enum class NormKind { L1, L2, Linf };

const char* to_string(NormKind kind);
NormKind norm_kind_from_string(const std::string& s);

/// The dual norm pairing used by every program builder: L1 <-> Linf, L2 <-> L2.
NormKind dual_norm(NormKind kind);

double norm_of(NormKind kind, const Eigen::VectorXd& v);

/// Sparse linear row `sum_i coef[i] * x[idx[i]]  (= | <=)  rhs`.
struct LinearRow {
  std::vector<int> idx;
  std::vector<double> coef;
  double rhs = 0.0;

  void add(int var, double c) {
    idx.push_back(var);
    coef.push_back(c);
  }
};

/// Norm-cone constraint `|| x[vars] ||_kind <= x[bound]`.
struct ConeBlock {
  NormKind kind = NormKind::L2;
  std::vector<int> vars;
  int bound = -1;
};

/// A linear program with optional norm-cone blocks, in the exact shape the
/// program builders produce.  L1/Linf cones are polyhedral and are lowered to
/// linear rows inside the solver; L2 cones become second-order cones.
struct ConicProgram {
  int n_vars = 0;
  std::vector<double> objective;  // minimize objective . x
  std::vector<LinearRow> eq_rows;
  std::vector<LinearRow> ineq_rows;
  std::vector<ConeBlock> cones;
  std::vector<int> nonneg_vars;
  std::vector<std::string> var_names;

  int add_var(double obj = 0.0, std::string name = {});
  int add_nonneg_var(double obj = 0.0, std::string name = {});
  LinearRow& add_eq(double rhs = 0.0);
  LinearRow& add_ineq(double rhs = 0.0);
  void add_cone(NormKind kind, std::vector<int> vars, int bound);

  int n_rows() const {
    return static_cast<int>(eq_rows.size() + ineq_rows.size() + cones.size());
  }

  /// Checks index ranges and the cone invariant (bound is a real variable).
  void validate() const;
};

enum class SolveStatus { Optimal, Unbounded, Infeasible, IterationLimit };

const char* to_string(SolveStatus status);

struct SolveResult {
  SolveStatus status = SolveStatus::IterationLimit;
  double value = 0.0;       // objective at the primal point when Optimal
  double dual_value = 0.0;  // certified lower bound on the optimum when Optimal
  Eigen::VectorXd primal;   // optimal point, or the improving ray when Unbounded
  Eigen::VectorXd dual_eq;    // multipliers of eq_rows (when available)
  Eigen::VectorXd dual_ineq;  // multipliers of ineq_rows (when available)
  int iterations = 0;
  double wall_ms = 0.0;
  double primal_residual = 0.0;
  double relative_gap = 0.0;
};

struct SolveOptions {
  double tolerance = 1e-9;
  int iteration_limit = 200;
};

/// Deterministic interior-point solve; pure LPs of modest size fall back to
/// the dense simplex when the interior point method stalls.
/// Throws Error(NumericalFailure) when the iteration breaks down beyond
/// recovery; infeasibility is a status, not an error.
SolveResult solve(const ConicProgram& program, const SolveOptions& options = {});

/// Exact transport plan between two discrete weight vectors under an explicit
/// cost matrix (supply.size() x demand.size()).  Solved by the dense simplex,
/// so the returned plan is a vertex of the transportation polytope.
struct TransportSolution {
  double value = 0.0;
  Eigen::MatrixXd plan;
};

TransportSolution solve_transport(const Eigen::MatrixXd& costs,
                                  const Eigen::VectorXd& supply,
                                  const Eigen::VectorXd& demand);

/// Debug dump in CPLEX LP text format for external cross-checks.  L2 cones
/// cannot be expressed there and are emitted as comments.
void write_lp(const ConicProgram& program, std::ostream& out);

namespace detail {
/// Dense two-phase primal simplex on `min c.x  s.t.  A x = b, x >= 0`.
/// Bland's rule, hence deterministic and cycle-free.  Used by the transport
/// specialization and as the pure-LP fallback.
struct StandardFormLP {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
};

struct SimplexResult {
  SolveStatus status = SolveStatus::IterationLimit;
  double value = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd ray;  // improving direction when Unbounded
  Eigen::VectorXd dual; // row multipliers when Optimal
  int iterations = 0;
};

/// `initial_basis`, when given, must list one feasible basic column per row
/// (a spanning basis with b >= 0 in the original row signs); phase 1 is then
/// skipped entirely.
SimplexResult simplex_solve(const StandardFormLP& lp, int iteration_limit = 50000,
                            const std::vector<int>* initial_basis = nullptr);

/// Interior-point core on the homogeneous self-dual embedding.
struct ConeSpec {
  int n_nonneg = 0;
  std::vector<int> soc_dims;  // each >= 2, ordered after the orthant slice
};

struct IpmProblem {
  // min c.x  s.t.  A x = b,  G x + s = h,  s in (R+^p) x SOC(q_1) x ...
  Eigen::SparseMatrix<double> A, G;
  Eigen::VectorXd b, h, c;
  ConeSpec cone;
};

struct IpmResult {
  SolveStatus status = SolveStatus::IterationLimit;
  Eigen::VectorXd x, y, z, s;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double relative_gap = 0.0;
};

IpmResult ipm_solve(const IpmProblem& problem, const SolveOptions& options);
}  // namespace detail

}  // namespace swdro
