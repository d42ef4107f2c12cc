#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "swdro/conic.hpp"
#include "swdro/distribution.hpp"
#include "swdro/loss.hpp"

namespace swdro {

/// One structured uncertainty-quantification instance: worst case of
/// E_{P^{(x)N}} l over the ball W_c(P, nominal) <= radius.
struct UQInstance {
  DiscreteDistribution nominal;
  double radius = 0.0;
  TransportCost cost;
  PolyhedralLoss loss;
  int arity = 0;  // N

  void validate() const;
};

/// Assembled program plus the index metadata the CLI reports.
struct BuiltProgram {
  ConicProgram program;
  int n_classes = 0;
  int n_tuples = 0;
  int mu_var = -1;
  std::vector<int> theta_vars;  // nonempty only for the joint outer program
};

using Selector = std::function<std::vector<int>(const MultiIndexClass&)>;

/// Lifted symmetrized relaxation at lifting parameter M >= N.  The selector
/// picks the class member whose atom enters the sigma row; the solved value
/// is selector-independent.
BuiltProgram build_relaxation(const UQInstance& instance, int m,
                              std::int64_t cap = 5'000'000,
                              const Selector& selector = nullptr);

/// Unstructured baseline over the lifted ball of radius N*rho around the
/// product nominal (the M = 0 convention of the sweep output).
BuiltProgram build_unstructured(const UQInstance& instance,
                                std::int64_t cap = 5'000'000);

/// Multitransport-hyperrectangle bound: one transport budget per coordinate,
/// multipliers mu_1..mu_N.
BuiltProgram build_multitransport(const UQInstance& instance,
                                  std::int64_t cap = 5'000'000);

/// Joint outer program over theta: minimizes the relaxation value over the
/// decision box, yielding (theta*_M, Psi_U^M(theta*_M)) in one solve.
BuiltProgram build_outer_dro(const ParametricPolyhedralLoss& ploss,
                             const DiscreteDistribution& nominal, double radius,
                             const TransportCost& cost, int arity, int m,
                             std::int64_t cap = 5'000'000);

struct CurvePoint {
  int m = 0;  // 0 marks the unstructured baseline row
  double value = 0.0;
  std::string status;  // Optimal/Unbounded/Infeasible/IterationLimit/CapExceeded/...
  int n_vars = 0;
  int n_rows = 0;
  double solve_ms = 0.0;
};

struct RelaxationCurve {
  std::vector<CurvePoint> points;

  /// Largest violation of the nonincreasing property over solved points
  /// (positive = violation).
  double monotonicity_violation() const;
};

struct SweepOptions {
  std::int64_t cap = 5'000'000;
  SolveOptions solve;
  int jobs = 1;
  bool include_unstructured = true;
};

/// Per-M solve of the relaxation sequence.  Failures (caps, solver) are
/// recorded in the curve without aborting the remaining points.
RelaxationCurve sweep_relaxation(const UQInstance& instance,
                                 const std::vector<int>& m_range,
                                 const SweepOptions& options = {});

/// Solve helper returning value +infinity on Unbounded instead of a value-less
/// status (the UQ supremum is infinite); never clamps.
struct ProgramValue {
  double value = 0.0;
  SolveStatus status = SolveStatus::IterationLimit;
  SolveResult result;
};

ProgramValue solve_program(const BuiltProgram& built,
                           const SolveOptions& options = {});

struct OuterPoint {
  int m = 0;
  Eigen::VectorXd theta;
  double value = 0.0;  // Psi_U^M(theta*_M)
  std::string status;
  int n_vars = 0;
  int n_rows = 0;
  double solve_ms = 0.0;
};

struct OuterSweep {
  std::vector<OuterPoint> points;
  std::vector<double> proxy;  // Psi_U^{M_max}(theta*_M) per point
  int m_star = 0;             // argmin of the proxy over solved points
};

OuterSweep sweep_outer_dro(const ParametricPolyhedralLoss& ploss,
                           const DiscreteDistribution& nominal, double radius,
                           const TransportCost& cost, int arity,
                           const std::vector<int>& m_range, int m_proxy,
                           const SweepOptions& options = {});

/// E_{nominal^{(x)N}} loss by direct atom enumeration (the rho = 0 collapse
/// value).
double product_expectation(const DiscreteDistribution& nominal,
                           const PolyhedralLoss& loss,
                           std::int64_t cap = 1 << 20);

}  // namespace swdro
