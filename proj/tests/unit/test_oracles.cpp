#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "swdro/oracles.hpp"

using namespace swdro;

TEST_CASE("closed-form reference values") {
  CHECK(reference_value("variance_s", 0.3, 0) == doctest::Approx(0.3));
  CHECK(reference_value("variance_u", 0.3, 0) == doctest::Approx(0.6));
  CHECK(reference_value("neg_product_s", 1.7, 0) == doctest::Approx(0.0));
  CHECK(reference_value("cubic_gap_s", 0.49, 0) ==
        doctest::Approx(std::pow(0.49, 1.5)));

  // golden-section minimum of the lifted expression at M=2, rho=1
  CHECK(reference_value("lifted", 1.0, 2) ==
        doctest::Approx(3.0 * std::sqrt(3.0) / 2.0).epsilon(1e-9));

  // symmetrized bound of the shifted quadratic vanishes at rho = 1/2
  CHECK(reference_value("sym_quad_usym", 0.5, 0) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // the unstructured bound dominates the structured value
  for (double rho : {0.1, 0.5, 1.0}) {
    CHECK(reference_value("neg_product_u", rho, 0) >= rho - 1e-9);
    CHECK(reference_value("sym_quad_u", rho, 0) >=
          reference_value("sym_quad_s", rho, 0) - 1e-9);
  }

  CHECK_THROWS_AS(reference_value("no_such_case", 0.1, 2), Error);
  CHECK_THROWS_AS(reference_value("lifted", -1.0, 2), Error);
  CHECK_THROWS_AS(reference_value("lifted", 0.5, 1), Error);
}

TEST_CASE("lifted case obeys the decay envelope") {
  for (double rho : {0.25, 1.0}) {
    double prev = std::numeric_limits<double>::infinity();
    for (int m = 2; m <= 50; ++m) {
      const double v = reference_value("lifted", rho, m);
      const double bound =
          (std::sqrt(rho) + 1.0) * (std::sqrt(rho) + 1.0) / (m - 1);
      CHECK(v >= 0.0 - 1e-9);
      CHECK(v <= bound + 1e-9);
      CHECK(v <= prev + 1e-9);
      prev = v;
    }
  }
  // crossing points of the 0.1 level, pinned against an independent fine scan
  CHECK(reference_value("lifted", 0.25, 23) ==
        doctest::Approx(0.094039633).epsilon(1e-6));
  CHECK(reference_value("lifted", 1.0, 40) ==
        doctest::Approx(0.100062502).epsilon(1e-6));
  CHECK(reference_value("lifted", 1.0, 41) < 0.1);
}

TEST_CASE("golden-section handles infinite left plateaus") {
  auto f = [](double x) {
    if (x < 1.0) return std::numeric_limits<double>::infinity();
    return (x - 2.0) * (x - 2.0);
  };
  CHECK(golden_section_min(f, 0.0, 10.0, 1e-10) ==
        doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("semi-infinite dual matches the assembled relaxation") {
  UQInstance inst = testutil::two_point_instance();
  for (int m : {2, 3}) {
    const double program = solve_program(build_relaxation(inst, m)).value;
    const double dual = semi_infinite_dual(inst, m);
    CHECK(std::abs(program - dual) <= 1e-5);
  }

  UQInstance zero = inst;
  zero.radius = 0.0;
  CHECK(semi_infinite_dual(zero, 2) == doctest::Approx(-2.875).epsilon(1e-6));

  testutil::Rng rng(909);
  for (int trial = 0; trial < 4; ++trial) {
    UQInstance random = testutil::random_instance(rng);
    for (int m : {2, 3}) {
      const double program = solve_program(build_relaxation(random, m)).value;
      const double dual = semi_infinite_dual(random, m);
      CHECK(std::abs(program - dual) <= 1e-5);
    }
  }
}

TEST_CASE("grid primal reproduces the worked examples") {
  TransportCost cost{NormKind::L2, 1};
  GridPrimalOptions opts;
  opts.cost_power = GroundCostPower::SquaredNorm;

  // worst-case variance around a point mass
  for (double rho : {0.25, 1.0}) {
    Eigen::MatrixXd grid(3, 1);
    grid << -std::sqrt(rho), 0.0, std::sqrt(rho);
    QuadraticExampleLoss var{QuadraticExampleKind::HalfSquaredDifference};
    const double best = grid_primal_lower_bound(
        DiscreteDistribution::dirac(Eigen::VectorXd::Zero(1)), rho, cost,
        [&](const Eigen::VectorXd& x) { return var(x); }, 2, grid, opts);
    CHECK(best == doctest::Approx(rho).epsilon(1e-6));
  }

  // the structured value of -x1 x2 around the symmetric nominal is zero
  {
    Eigen::MatrixXd atoms(2, 1);
    atoms << -1, 1;
    Eigen::VectorXd w(2);
    w << 0.5, 0.5;
    Eigen::MatrixXd grid(5, 1);
    grid << -2, -1, 0, 1, 2;
    QuadraticExampleLoss np{QuadraticExampleKind::NegProduct};
    const double best = grid_primal_lower_bound(
        make_distribution(atoms, w), 0.5, cost,
        [&](const Eigen::VectorXd& x) { return np(x); }, 2, grid, opts);
    CHECK(best == doctest::Approx(0.0).epsilon(1e-8));
  }

  // x1 x2^2 around a point mass climbs to rho^{3/2}
  {
    const double rho = 0.49;
    Eigen::MatrixXd grid(2, 1);
    grid << 0.0, std::sqrt(rho);
    QuadraticExampleLoss cg{QuadraticExampleKind::ProductOfSquare};
    const double best = grid_primal_lower_bound(
        DiscreteDistribution::dirac(Eigen::VectorXd::Zero(1)), rho, cost,
        [&](const Eigen::VectorXd& x) { return cg(x); }, 2, grid, opts);
    CHECK(best == doctest::Approx(std::pow(rho, 1.5)).epsilon(1e-6));
  }

  Eigen::MatrixXd empty(1, 1);
  CHECK_THROWS_AS(grid_primal_lower_bound(
                      DiscreteDistribution::dirac(Eigen::VectorXd::Zero(1)),
                      0.1, cost, [](const Eigen::VectorXd&) { return 0.0; }, 2,
                      Eigen::MatrixXd(0, 1), opts),
                  Error);
}

TEST_CASE("grid primal stays below the assembled relaxation") {
  testutil::Rng rng(414);
  for (int trial = 0; trial < 4; ++trial) {
    UQInstance inst = testutil::random_instance(rng);
    // grid contains the nominal atoms, so the ball is always reachable
    Eigen::MatrixXd grid(3 + inst.nominal.size(), 1);
    grid.topRows(3) << -2.5, 0, 2.5;
    grid.bottomRows(inst.nominal.size()) = inst.nominal.atoms();
    GridPrimalOptions opts;
    opts.cost_power = GroundCostPower::Norm;
    opts.seed = trial;
    const double lower = grid_primal_lower_bound(
        inst.nominal, inst.radius, inst.cost,
        [&](const Eigen::VectorXd& x) { return inst.loss.eval(x); },
        inst.arity, grid, opts);
    for (int m : {2, 3}) {
      const double upper = solve_program(build_relaxation(inst, m)).value;
      CHECK(lower <= upper + 1e-5);
    }
  }
}

TEST_CASE("grid primal is deterministic for a fixed seed") {
  testutil::Rng rng(515);
  UQInstance inst = testutil::random_instance(rng);
  Eigen::MatrixXd grid(3 + inst.nominal.size(), 1);
  grid.topRows(3) << -2, 0, 2;
  grid.bottomRows(inst.nominal.size()) = inst.nominal.atoms();
  GridPrimalOptions opts;
  opts.seed = 99;
  auto run = [&] {
    return grid_primal_lower_bound(
        inst.nominal, inst.radius, inst.cost,
        [&](const Eigen::VectorXd& x) { return inst.loss.eval(x); },
        inst.arity, grid, opts);
  };
  CHECK(run() == run());
}

TEST_CASE("witness sequence of the infinite-gap example grows like rho * n") {
  // objective of P_n = (1 - rho/n^2) delta_0 + (rho/n^2) delta_n on x1 x2^2,
  // evaluated exactly: (rho/n^2) * n^3 = rho * n
  const double rho = 0.25;
  QuadraticExampleLoss loss{QuadraticExampleKind::ProductOfSquare};
  for (int n = 1; n <= 100; ++n) {
    const double mass = rho / (static_cast<double>(n) * n);
    Eigen::VectorXd point(2);
    point << n, n;
    const double objective = mass * loss(point);
    CHECK(objective == doctest::Approx(rho * n).epsilon(1e-12));
  }
}
