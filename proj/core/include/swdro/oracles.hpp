#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "swdro/program.hpp"

namespace swdro {

/// Closed-form reference values for the worked quadratic examples (squared
/// Euclidean ground cost, X = R).  Each case evaluates its closed form;
/// scalar infima over mu are computed by golden-section to 1e-10.
struct ReferenceCase {
  std::string name;
  std::string provenance;
  // (rho, m) -> value; m is ignored by the M-independent quantities.
  std::function<double(double, int)> eval;
};

const std::vector<ReferenceCase>& reference_cases();
const ReferenceCase& reference_case(const std::string& name);

/// Values: "variance_s", "variance_u", "neg_product_s", "neg_product_u",
/// "lifted", "sym_quad_s", "sym_quad_u", "sym_quad_usym", "cubic_gap_s".
double reference_value(const std::string& case_name, double rho, int m);

/// Minimizes a convex scalar function on [lo, hi] by golden-section;
/// +infinity values are treated as above everything finite.
double golden_section_min(const std::function<double(double)>& f, double lo,
                          double hi, double tol = 1e-10);

/// Independent evaluation of the lifted relaxation value through the
/// semi-infinite dual: full atom enumeration of nominal^{(x)M}, one concave
/// maximization per atom for phi_mu, then a golden-section over mu >= 0 on
/// [0, mu_max] with mu_max the largest vertex-gradient dual norm.
/// Requires the loss in vertex representation.
double semi_infinite_dual(const UQInstance& instance, int m,
                          double mu_tol = 1e-10, std::int64_t cap = 1 << 20);

enum class GroundCostPower { Norm = 1, SquaredNorm = 2 };

struct GridPrimalOptions {
  int restarts = 8;
  int max_iters = 400;
  std::uint64_t seed = 0;
  GroundCostPower cost_power = GroundCostPower::Norm;
  std::int64_t cap = 1 << 20;
};

/// Heuristic primal side of the structured problem: optimizes weights on a
/// fixed support grid inside the transport ball by multi-start pairwise mass
/// transfer with backtracking.  Every accepted iterate is feasible (ball
/// membership re-checked by a transport LP), so the best objective found is a
/// certified lower bound on S(l).  Deterministic for a fixed seed.
double grid_primal_lower_bound(
    const DiscreteDistribution& nominal, double rho, const TransportCost& cost,
    const std::function<double(const Eigen::VectorXd&)>& loss, int arity,
    const Eigen::MatrixXd& grid, const GridPrimalOptions& options = {});

}  // namespace swdro
