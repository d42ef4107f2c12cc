// Acceptance suite: one line per criterion, every tolerance pinned in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "swdro/io.hpp"
#include "swdro/oracles.hpp"
#include "swdro/program.hpp"

using namespace swdro;

namespace {

struct Check {
  std::vector<std::string> failures;

  void that(bool cond, const std::string& msg) {
    if (!cond) failures.push_back(msg);
  }
  void close(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      std::ostringstream os;
      os << what << ": got " << got << ", want " << want << " +/- " << tol;
      failures.push_back(os.str());
    }
  }
};

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(engine() >> 11) * 0x1.0p-53);
  }
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(engine() % static_cast<std::uint64_t>(hi - lo + 1));
  }
};

DiscreteDistribution random_distribution(Rng& rng, int d, int max_atoms) {
  const int n = rng.uniform_int(1, max_atoms);
  Eigen::MatrixXd atoms(n, d);
  Eigen::VectorXd weights(n);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c) atoms(i, c) = rng.uniform(-2, 2);
    weights[i] = rng.uniform(0.05, 1.0);
  }
  weights /= weights.sum();
  return make_distribution(atoms, weights);
}

PolyhedralLoss random_vertex_loss(Rng& rng, int block_dim, int arity,
                                  bool symmetric) {
  const int k = rng.uniform_int(2, 4);
  const int cols = block_dim * arity + 1;
  Eigen::MatrixXd h(symmetric ? 2 * k : k, cols);
  for (int v = 0; v < k; ++v) {
    for (int c = 0; c < cols - 1; ++c) h(v, c) = rng.uniform(-3, 3);
    h(v, cols - 1) = rng.uniform(-1, 1);
  }
  if (symmetric) {
    for (int v = 0; v < k; ++v) {
      for (int b = 0; b < arity; ++b) {
        const int src = ((b + 1) % arity) * block_dim;
        h.block(k + v, b * block_dim, 1, block_dim) =
            h.block(v, src, 1, block_dim);
      }
      h(k + v, cols - 1) = h(v, cols - 1);
    }
  }
  return PolyhedralLoss::from_vertices(block_dim, arity, h);
}

UQInstance two_point_instance() {
  Eigen::MatrixXd atoms(2, 1);
  atoms << -1, 1;
  Eigen::VectorXd w(2);
  w << 0.25, 0.75;
  Eigen::MatrixXd h(2, 3);
  h << 2, 5, 0, -5, 2, 0;
  return UQInstance{make_distribution(atoms, w), 0.2,
                    TransportCost{NormKind::L2, 1},
                    PolyhedralLoss::from_vertices(1, 2, h), 2};
}

ParametricPolyhedralLoss decision_box_loss() {
  Eigen::MatrixXd w(4, 3);
  w << 1, 1, -1, -1, 0, 0, 1.5, -0.5, -0.5, 0, 0, 1;
  Eigen::MatrixXd g(4, 1);
  g << -1, 1, -1, 1;
  Eigen::VectorXd g0(4);
  g0 << 1, 0, 0.5, 0;
  Eigen::MatrixXd box(1, 2);
  box << -3, 3;
  return ParametricPolyhedralLoss(1, 2, w, g, g0, box);
}

// reads (M, value) pairs from a golden CSV; value_col counts from zero
std::vector<std::pair<int, double>> load_golden_values(const std::string& path,
                                                       int value_col = 1) {
  std::vector<std::pair<int, double>> out;
  std::ifstream in(path);
  if (!in.good()) return out;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::vector<std::string> cols;
    std::string tok;
    while (std::getline(ss, tok, ',')) cols.push_back(tok);
    if (static_cast<int>(cols.size()) <= value_col) continue;
    out.emplace_back(std::stoi(cols[0]), std::stod(cols[value_col]));
  }
  return out;
}

// ---- criteria ----

void criterion_ot_exactness(Check& c) {
  Eigen::MatrixXd pa(2, 1), qa(2, 1);
  pa << -0.9, 1.1;
  qa << -1, 1;
  Eigen::VectorXd pw(2), qw(2);
  pw << 0.3, 0.7;
  qw << 0.25, 0.75;
  DiscreteDistribution pstar = make_distribution(pa, pw);
  DiscreteDistribution phat = make_distribution(qa, qw);

  const auto t0 = std::chrono::steady_clock::now();
  WassersteinSolution sol =
      wasserstein_exact(pstar, phat, TransportCost{NormKind::L2, 1});
  const auto t1 = std::chrono::steady_clock::now();
  const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  c.close(sol.value, 0.19, 1e-9, "W(P*, Phat)");
  c.that(ms < 10.0, "transport solve took " + std::to_string(ms) + " ms");
}

void criterion_product_identity(Check& c) {
  Rng rng(1001);
  int done = 0;
  while (done < 50) {
    for (NormKind norm : {NormKind::L1, NormKind::L2, NormKind::Linf}) {
      const int d = rng.uniform_int(1, 2);
      DiscreteDistribution p = random_distribution(rng, d, 4);
      DiscreteDistribution q = random_distribution(rng, d, 4);
      const int m = rng.uniform_int(2, 3);
      TransportCost cost{norm, d};
      const double base = wasserstein_exact(p, q, cost).value;
      const double lifted =
          wasserstein_exact(product_power(p, m), product_power(q, m), cost)
              .value;
      c.close(lifted, m * base, 1e-6, "product identity");
      ++done;
    }
  }
}

void criterion_mixture_monotone(Check& c) {
  Rng rng(1002);
  TransportCost cost{NormKind::L2, 1};
  for (int trial = 0; trial < 20; ++trial) {
    const int comps = rng.uniform_int(1, 3);
    std::vector<std::pair<double, DiscreteDistribution>> nu;
    Eigen::VectorXd w(comps);
    for (int k = 0; k < comps; ++k) w[k] = rng.uniform(0.1, 1.0);
    w /= w.sum();
    for (int k = 0; k < comps; ++k) {
      nu.emplace_back(w[k], random_distribution(rng, 1, 3));
    }
    DiscreteDistribution phat = random_distribution(rng, 1, 3);
    double bound = 0.0;
    for (const auto& [wk, pk] : nu) {
      bound += wk * wasserstein_exact(pk, phat, cost).value;
    }
    double prev = -1.0;
    for (int m = 1; m <= 4; ++m) {
      const double val = normalized_mixture_product_distance(nu, phat, m, cost);
      c.that(val >= prev - 1e-7, "mixture distance decreased in M");
      c.that(val <= bound + 1e-7, "mixture distance exceeded the mean bound");
      prev = val;
    }
  }

  DiscreteDistribution dm1 = DiscreteDistribution::dirac(-Eigen::VectorXd::Ones(1));
  DiscreteDistribution dp1 = DiscreteDistribution::dirac(Eigen::VectorXd::Ones(1));
  Eigen::MatrixXd atoms(2, 1);
  atoms << -1, 1;
  Eigen::VectorXd hw(2);
  hw << 0.5, 0.5;
  DiscreteDistribution phat = make_distribution(atoms, hw);
  c.close(normalized_mixture_product_distance({{0.5, dm1}, {0.5, dp1}}, phat, 1,
                                              cost),
          0.0, 1e-8, "two-point mixture at M=1");
  c.close(normalized_mixture_product_distance({{0.5, dm1}, {0.5, dp1}}, phat, 2,
                                              cost),
          0.5, 1e-8, "two-point mixture at M=2");
}

void criterion_program_oracle_agreement(Check& c) {
  UQInstance inst = two_point_instance();
  for (int m : {2, 3}) {
    const double program = solve_program(build_relaxation(inst, m)).value;
    const double dual = semi_infinite_dual(inst, m);
    c.close(program, dual, 1e-5, "two-point agreement at M=" + std::to_string(m));
  }
  Rng rng(1004);
  for (int trial = 0; trial < 10; ++trial) {
    UQInstance inst2{random_distribution(rng, 1, 2), rng.uniform(0.05, 0.5),
                     TransportCost{NormKind::L2, 1},
                     random_vertex_loss(rng, 1, 2, false), 2};
    const int m = rng.uniform_int(2, 3);
    const double program = solve_program(build_relaxation(inst2, m)).value;
    const double dual = semi_infinite_dual(inst2, m);
    c.close(program, dual, 1e-5,
            "random agreement trial " + std::to_string(trial));
  }
}

void criterion_monotone_chain(Check& c) {
  UQInstance inst = two_point_instance();
  std::vector<std::pair<int, double>> values;
  const double unstructured = solve_program(build_unstructured(inst)).value;
  values.emplace_back(0, unstructured);
  double prev = unstructured;
  for (int m = 2; m <= 16; ++m) {
    const ProgramValue pv = solve_program(build_relaxation(inst, m));
    c.that(pv.status == SolveStatus::Optimal,
           "relaxation at M=" + std::to_string(m) + " did not solve");
    c.that(pv.value <= prev + 1e-6,
           "chain increased at M=" + std::to_string(m));
    prev = pv.value;
    values.emplace_back(m, pv.value);
  }

  // golden-file stability
  const auto golden =
      load_golden_values(std::string(SWDRO_GOLDEN_DIR) + "/sweep_two_point.csv");
  c.that(!golden.empty(), "golden file sweep_two_point.csv missing");
  for (const auto& [m, want] : golden) {
    bool found = false;
    for (const auto& [gm, got] : values) {
      if (gm == m) {
        c.close(got, want, 1e-6, "golden value at M=" + std::to_string(m));
        found = true;
      }
    }
    c.that(found, "golden row M=" + std::to_string(m) + " not produced");
  }
}

void criterion_lifted_closed_form(Check& c) {
  for (double rho : {0.25, 1.0}) {
    const double s = std::sqrt(rho) + 1.0;
    for (int m = 2; m <= 50; ++m) {
      const double v = reference_value("lifted", rho, m);
      c.that(v >= -1e-9, "lifted value went negative");
      c.that(v <= s * s / (m - 1) + 1e-9, "lifted value above the envelope");
    }
    const int m_star = static_cast<int>(std::ceil(10.0 * s * s));
    const double at_star = reference_value("lifted", rho, m_star);
    std::ostringstream os;
    os << "value at rho=" << rho << ", M=" << m_star << " is " << at_star
       << ", not below 0.1 (first crossing is at M=" << m_star + 1 << ": "
       << reference_value("lifted", rho, m_star + 1) << ")";
    c.that(at_star < 0.1, os.str());
  }
}

void criterion_selector_invariance(Check& c) {
  UQInstance inst = two_point_instance();
  const double canonical = solve_program(build_relaxation(inst, 4)).value;
  Rng rng(1007);
  for (int trial = 0; trial < 10; ++trial) {
    Selector shuffled = [&rng](const MultiIndexClass& cls) {
      std::vector<int> member = cls.representative;
      for (size_t i = member.size() - 1; i > 0; --i) {
        std::swap(member[i], member[rng.uniform_int(0, static_cast<int>(i))]);
      }
      return member;
    };
    const double value =
        solve_program(build_relaxation(inst, 4, 5'000'000, shuffled)).value;
    c.close(value, canonical, 1e-7,
            "selector trial " + std::to_string(trial));
  }
}

void criterion_multitransport_dominance(Check& c) {
  Rng rng(1008);
  for (int trial = 0; trial < 10; ++trial) {
    UQInstance inst{random_distribution(rng, 1, 2), rng.uniform(0.05, 0.5),
                    TransportCost{NormKind::L2, 1},
                    random_vertex_loss(rng, 1, 2, true), 2};
    const double multi = solve_program(build_multitransport(inst)).value;
    const double usym = solve_program(build_relaxation(inst, 2)).value;
    c.that(multi >= usym - 1e-6,
           "multitransport fell below the symmetrized bound (trial " +
               std::to_string(trial) + ")");
  }
}

void criterion_rho_zero_collapse(Check& c) {
  UQInstance inst = two_point_instance();
  inst.radius = 0.0;
  const double expect = -2.875;
  c.close(product_expectation(inst.nominal, inst.loss), expect, 1e-12,
          "direct expectation");
  c.close(solve_program(build_unstructured(inst)).value, expect, 1e-7,
          "unstructured at rho=0");
  c.close(solve_program(build_multitransport(inst)).value, expect, 1e-7,
          "multitransport at rho=0");
  for (int m : {2, 3}) {
    c.close(solve_program(build_relaxation(inst, m)).value, expect, 1e-7,
            "relaxation at rho=0, M=" + std::to_string(m));
  }
}

void criterion_outer_dro(Check& c) {
  ParametricPolyhedralLoss ploss = decision_box_loss();
  Eigen::MatrixXd atoms(2, 1);
  atoms << 1, -1;
  Eigen::VectorXd w(2);
  w << 0.5, 0.5;
  DiscreteDistribution nominal = make_distribution(atoms, w);
  TransportCost cost{NormKind::L2, 1};

  std::vector<int> ms;
  for (int m = 2; m <= 8; ++m) ms.push_back(m);
  OuterSweep sweep = sweep_outer_dro(ploss, nominal, 0.25, cost, 2, ms, 8);

  double prev = std::numeric_limits<double>::infinity();
  for (const auto& pt : sweep.points) {
    c.that(pt.status == "Optimal",
           "outer point M=" + std::to_string(pt.m) + " did not solve");
    c.that(pt.value <= prev + 1e-6,
           "outer objective increased at M=" + std::to_string(pt.m));
    prev = pt.value;
    c.that(pt.theta.size() == 1 && pt.theta[0] >= -3 - 1e-7 &&
               pt.theta[0] <= 3 + 1e-7,
           "decision left the box at M=" + std::to_string(pt.m));
  }

  // the proxy sequence converges but not monotonically
  double max_uptick = 0.0;
  for (size_t i = 1; i < sweep.proxy.size(); ++i) {
    max_uptick = std::max(max_uptick, sweep.proxy[i] - sweep.proxy[i - 1]);
  }
  {
    std::ostringstream os;
    os << "proxy sequence shows no uptick above 1e-9 (max "
       << max_uptick << "); with this instance data the relaxation "
       << "value is M-independent, so the sequence is constant";
    c.that(max_uptick > 1e-9, os.str());
  }
  c.that(sweep.m_star >= 2 && sweep.m_star <= 8, "M* not reported");

  const auto golden =
      load_golden_values(std::string(SWDRO_GOLDEN_DIR) + "/dro_decision_box.csv", 2);
  c.that(!golden.empty(), "golden file dro_decision_box.csv missing");
  for (const auto& [m, want] : golden) {
    for (const auto& pt : sweep.points) {
      if (pt.m == m) {
        c.close(pt.value, want, 1e-6,
                "golden outer value at M=" + std::to_string(m));
      }
    }
  }
}

void criterion_divergence_demo(Check& c) {
  const double rho = 0.25;
  QuadraticExampleLoss loss{QuadraticExampleKind::ProductOfSquare};
  for (int n = 1; n <= 100; ++n) {
    const double mass = rho / (static_cast<double>(n) * n);
    Eigen::VectorXd point(2);
    point << n, n;
    const double objective = mass * loss(point);
    c.close(objective, rho * n, 1e-9 * n, "witness objective at n=" +
                                              std::to_string(n));
  }

  Eigen::MatrixXd grid(2, 1);
  grid << 0.0, std::sqrt(rho);
  GridPrimalOptions opts;
  opts.cost_power = GroundCostPower::SquaredNorm;
  const double best = grid_primal_lower_bound(
      DiscreteDistribution::dirac(Eigen::VectorXd::Zero(1)), rho,
      TransportCost{NormKind::L2, 1},
      [&](const Eigen::VectorXd& x) { return loss(x); }, 2, grid, opts);
  c.close(best, std::pow(rho, 1.5), 1e-6, "grid primal on the 2-point grid");
}

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  std::function<void(Check&)> body;
};

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "discrete OT exactness on the reference pair", 1.0,
       criterion_ot_exactness},
      {2, "product identity over randomized pairs", 30.0,
       criterion_product_identity},
      {3, "mixture-distance monotone bound", 60.0, criterion_mixture_monotone},
      {4, "program/oracle agreement", 60.0, criterion_program_oracle_agreement},
      {5, "monotone relaxation chain with golden values", 300.0,
       criterion_monotone_chain},
      {6, "closed-form lifted case envelope", 1.0, criterion_lifted_closed_form},
      {7, "selector invariance", 30.0, criterion_selector_invariance},
      {8, "multitransport dominance", 60.0, criterion_multitransport_dominance},
      {9, "rho=0 collapse of every builder", 5.0, criterion_rho_zero_collapse},
      {10, "outer DRO sweep with golden values", 300.0, criterion_outer_dro},
      {11, "divergence demo and grid primal", 10.0, criterion_divergence_demo},
  };

  int failures = 0;
  for (auto& criterion : criteria) {
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criterion.body(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    const auto t1 = std::chrono::steady_clock::now();
    const double secs = std::chrono::duration<double>(t1 - t0).count();
    if (secs > criterion.budget_s) {
      check.failures.push_back("exceeded the " +
                               std::to_string(criterion.budget_s) +
                               " s budget");
    }
    if (check.failures.empty()) {
      std::printf("[PASS] criterion %2d: %s (%.2fs)\n", criterion.id,
                  criterion.title.c_str(), secs);
    } else {
      ++failures;
      std::printf("[FAIL] criterion %2d: %s (%.2fs)\n", criterion.id,
                  criterion.title.c_str(), secs);
      for (const auto& f : check.failures) {
        std::printf("       - %s\n", f.c_str());
      }
    }
    std::fflush(stdout);
  }
  if (failures == 0) {
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  } else {
    std::printf("%d acceptance criteria failed\n", failures);
  }
  return failures == 0 ? 0 : 1;
}
