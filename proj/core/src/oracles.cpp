#include "swdro/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace swdro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double require_rho(double rho) {
  require(rho >= 0.0, ErrorKind::OutOfDomain, "rho must be nonnegative");
  return rho;
}

}  // namespace

double golden_section_min(const std::function<double(double)>& f, double lo,
                          double hi, double tol) {
  require(hi >= lo, ErrorKind::InvalidArgument, "empty bracket");
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  double best = std::min(f1, f2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = f(x2);
    }
    best = std::min({best, f1, f2});
  }
  return best;
}

const std::vector<ReferenceCase>& reference_cases() {
  static const std::vector<ReferenceCase> cases = [] {
    std::vector<ReferenceCase> list;

    list.push_back({"variance_s",
                    "worst-case variance over a squared-distance ball around "
                    "a point mass",
                    [](double rho, int) { return require_rho(rho); }});
    list.push_back({"variance_u",
                    "unstructured bound for the variance case",
                    [](double rho, int) { return 2.0 * require_rho(rho); }});

    list.push_back({"neg_product_s",
                    "structured value of -x1*x2 around the symmetric "
                    "two-point nominal",
                    [](double rho, int) {
                      require_rho(rho);
                      return 0.0;
                    }});
    list.push_back(
        {"neg_product_u",
         "unstructured bound of -x1*x2: inf over mu > 1/2 of "
         "2*rho*mu - 2*mu/(1-4*mu^2)",
         [](double rho, int) {
           require_rho(rho);
           auto f = [rho](double mu) {
             const double den = 1.0 - 4.0 * mu * mu;
             if (den >= 0.0) return kInf;
             return 2.0 * rho * mu - 2.0 * mu / den;
           };
           const double hi = 0.5 + 1e3 * (1.0 + 1.0 / std::max(rho, 1e-3));
           return golden_section_min(f, 0.5, hi);
         }});
    list.push_back(
        {"lifted",
         "lifted relaxation of -x1*x2 at parameter M: inf over "
         "mu > 1/(M(M-1)) of M(rho-1)mu + (M-1)M^2 mu^2/((M-1)M mu - 1) * "
         "(1 - 1/((M-1)(1+M mu)))",
         [](double rho, int m) {
           require(rho > 0.0, ErrorKind::OutOfDomain,
                   "lifted case needs rho > 0");
           require(m >= 2, ErrorKind::OutOfDomain, "lifted case needs M >= 2");
           const double M = m;
           auto f = [rho, M](double mu) {
             const double den = (M - 1.0) * M * mu - 1.0;
             if (den <= 0.0) return kInf;
             const double lead = (M - 1.0) * M * M * mu * mu / den;
             const double trim = 1.0 - 1.0 / ((M - 1.0) * (1.0 + M * mu));
             return M * (rho - 1.0) * mu + lead * trim;
           };
           const double lo = 1.0 / (M * (M - 1.0));
           const double hi = lo + 1e3 * (1.0 + 1.0 / std::max(rho, 1e-3));
           return golden_section_min(f, lo, hi);
         }});

    list.push_back({"sym_quad_s",
                    "structured value of -2x1^2 - 2x1x2: "
                    "-2(1 - min(sqrt(rho), 1))^2",
                    [](double rho, int) {
                      require_rho(rho);
                      const double t = 1.0 - std::min(std::sqrt(rho), 1.0);
                      return -2.0 * t * t;
                    }});
    list.push_back(
        {"sym_quad_u",
         "unstructured bound of -2x1^2 - 2x1x2: inf over mu > sqrt(2)-1 of "
         "2*rho*mu + 2*mu*(1-mu)/(mu*(mu+2)-1)",
         [](double rho, int) {
           require_rho(rho);
           auto f = [rho](double mu) {
             const double den = mu * (mu + 2.0) - 1.0;
             if (den <= 0.0) return kInf;
             return 2.0 * rho * mu + 2.0 * mu * (1.0 - mu) / den;
           };
           const double lo = std::sqrt(2.0) - 1.0;
           const double hi = lo + 1e3 * (1.0 + 1.0 / std::max(rho, 1e-3));
           return golden_section_min(f, lo, hi);
         }});
    list.push_back({"sym_quad_usym",
                    "symmetrized bound of -2x1^2 - 2x1x2: "
                    "2(2 sqrt(2 min(rho,1/2)) - 2 min(rho,1/2) - 1)",
                    [](double rho, int) {
                      require_rho(rho);
                      const double r = std::min(rho, 0.5);
                      return 2.0 * (2.0 * std::sqrt(2.0 * r) - 2.0 * r - 1.0);
                    }});

    list.push_back({"cubic_gap_s",
                    "structured value of x1*x2^2 around a point mass: rho^{3/2}",
                    [](double rho, int) {
                      require_rho(rho);
                      return std::pow(rho, 1.5);
                    }});
    return list;
  }();
  return cases;
}

const ReferenceCase& reference_case(const std::string& name) {
  for (const auto& c : reference_cases()) {
    if (c.name == name) return c;
  }
  fail(ErrorKind::OutOfDomain, "unknown reference case '" + name + "'");
}

double reference_value(const std::string& case_name, double rho, int m) {
  return reference_case(case_name).eval(rho, m);
}

namespace {

// phi_mu(xi) = sup_x (l o pr)_sym(x) - mu * c^M(x, xi), solved exactly as a
// concave maximization; +infinity when mu is below the coercivity threshold.
double inner_supremum(const PolyhedralLoss& loss, const TupleSet& tuples,
                      double coef, const TransportCost& cost, double mu,
                      const Eigen::VectorXd& xi, int m) {
  const int n = loss.block_dim();
  const int arity = loss.arity();
  const Eigen::MatrixXd& hv = loss.vertices();

  ConicProgram p;
  std::vector<int> xvars(static_cast<size_t>(n) * m);
  for (size_t i = 0; i < xvars.size(); ++i) {
    xvars[i] = p.add_var(0.0, "x" + std::to_string(i));
  }
  std::vector<int> tvars(tuples.tuples.size());
  for (size_t l = 0; l < tvars.size(); ++l) {
    tvars[l] = p.add_var(-coef, "t" + std::to_string(l));  // maximize coef*t
  }
  std::vector<int> svars(m);
  for (int j = 0; j < m; ++j) {
    svars[j] = p.add_var(mu, "s" + std::to_string(j));  // minimize mu*s
  }

  // t_l <= a_v . x_l + b_v for every vertex of H
  for (size_t l = 0; l < tuples.tuples.size(); ++l) {
    const auto& tuple = tuples.tuples[l];
    for (int v = 0; v < hv.rows(); ++v) {
      auto& row = p.add_ineq(hv(v, n * arity));
      row.add(tvars[l], 1.0);
      for (int k = 0; k < arity; ++k) {
        for (int c = 0; c < n; ++c) {
          row.add(xvars[static_cast<size_t>(tuple[k]) * n + c],
                  -hv(v, k * n + c));
        }
      }
    }
  }

  // || x_j - xi_j || <= s_j through mirror variables
  for (int j = 0; j < m; ++j) {
    std::vector<int> w(n);
    for (int c = 0; c < n; ++c) {
      w[c] = p.add_var(0.0);
      auto& eq = p.add_eq(-xi[static_cast<Eigen::Index>(j) * n + c]);
      eq.add(w[c], 1.0);
      eq.add(xvars[static_cast<size_t>(j) * n + c], -1.0);
    }
    p.add_cone(cost.norm, std::move(w), svars[j]);
  }

  // apex-degenerate optima (x_j = xi_j exactly) cap the reachable accuracy;
  // 1e-7 per solve keeps the oracle comfortably inside its 1e-5 budget
  SolveOptions options;
  options.tolerance = 1e-7;
  SolveResult res = solve(p, options);
  if (res.status == SolveStatus::Unbounded) return kInf;
  require(res.status == SolveStatus::Optimal, ErrorKind::SolverFailure,
          "inner supremum solve failed");
  return -res.value;
}

}  // namespace

double semi_infinite_dual(const UQInstance& instance, int m, double mu_tol,
                          std::int64_t cap) {
  instance.validate();
  require(m >= instance.arity, ErrorKind::InvalidArgument, "need M >= N");
  PolyhedralLoss loss = instance.loss.to_vertex_rep();
  const int n = loss.block_dim();
  const int arity = loss.arity();

  DiscreteDistribution prod = product_power(instance.nominal, m, cap);
  TupleSet tuples = enumerate_tuples(m, arity, cap);
  const double coef = 1.0 / static_cast<double>(falling_factorial(m, arity));

  // coercivity bound: largest per-block dual norm over the vertex gradients
  const NormKind dual = dual_norm(instance.cost.norm);
  double mu_max = 0.0;
  for (int v = 0; v < loss.vertices().rows(); ++v) {
    for (int k = 0; k < arity; ++k) {
      Eigen::VectorXd block =
          loss.vertices().row(v).segment(static_cast<Eigen::Index>(k) * n, n);
      mu_max = std::max(mu_max, norm_of(dual, block));
    }
  }
  if (mu_max == 0.0) mu_max = 1.0;  // constant loss

  auto dual_value = [&](double mu) {
    double total = m * instance.radius * mu;
    for (int i = 0; i < prod.size(); ++i) {
      const double phi =
          inner_supremum(loss, tuples, coef, instance.cost, mu, prod.atom(i), m);
      if (phi == kInf) return kInf;
      total += prod.weights()[i] * phi;
    }
    return total;
  };
  return golden_section_min(dual_value, 0.0, mu_max, mu_tol);
}

namespace {

double transport_ball_cost(const Eigen::MatrixXd& grid,
                           const Eigen::VectorXd& w,
                           const DiscreteDistribution& nominal,
                           const TransportCost& cost, GroundCostPower power) {
  Eigen::MatrixXd c(grid.rows(), nominal.size());
  for (int i = 0; i < grid.rows(); ++i) {
    for (int j = 0; j < nominal.size(); ++j) {
      const double base =
          norm_of(cost.norm, grid.row(i).transpose() - nominal.atom(j));
      c(i, j) = (power == GroundCostPower::SquaredNorm) ? base * base : base;
    }
  }
  return solve_transport(c, w, nominal.weights()).value;
}

}  // namespace

double grid_primal_lower_bound(
    const DiscreteDistribution& nominal, double rho, const TransportCost& cost,
    const std::function<double(const Eigen::VectorXd&)>& loss, int arity,
    const Eigen::MatrixXd& grid, const GridPrimalOptions& options) {
  require(grid.rows() >= 1, ErrorKind::EmptyGrid, "grid has no points");
  require(grid.cols() == nominal.dimension(), ErrorKind::DimensionMismatch,
          "grid dimension mismatch");
  const int g = static_cast<int>(grid.rows());
  const int d = static_cast<int>(grid.cols());
  double tuple_count = std::pow(static_cast<double>(g), arity);
  require(tuple_count <= static_cast<double>(options.cap),
          ErrorKind::CapExceeded, "grid^N too large");
  const auto n_tuples = static_cast<std::int64_t>(std::llround(tuple_count));

  // cache the loss on grid^N
  std::vector<double> values(static_cast<size_t>(n_tuples));
  {
    Eigen::VectorXd point(static_cast<Eigen::Index>(d) * arity);
    for (std::int64_t t = 0; t < n_tuples; ++t) {
      std::int64_t rest = t;
      for (int k = 0; k < arity; ++k) {
        const int idx = static_cast<int>(rest % g);
        rest /= g;
        point.segment(static_cast<Eigen::Index>(k) * d, d) =
            grid.row(idx).transpose();
      }
      values[static_cast<size_t>(t)] = loss(point);
    }
  }
  auto objective = [&](const Eigen::VectorXd& w) {
    double total = 0.0;
    for (std::int64_t t = 0; t < n_tuples; ++t) {
      double prob = 1.0;
      std::int64_t rest = t;
      for (int k = 0; k < arity; ++k) {
        prob *= w[static_cast<int>(rest % g)];
        rest /= g;
      }
      total += prob * values[static_cast<size_t>(t)];
    }
    return total;
  };
  // objective along w + delta * (e_to - e_from) as a polynomial in delta, so
  // the backtracking line search costs O(N) per trial step
  auto move_polynomial = [&](const Eigen::VectorXd& w, int from, int to) {
    std::vector<double> poly(static_cast<size_t>(arity) + 1, 0.0);
    std::vector<double> factor_w(arity), factor_s(arity);
    std::vector<double> acc(static_cast<size_t>(arity) + 1);
    for (std::int64_t t = 0; t < n_tuples; ++t) {
      std::int64_t rest = t;
      for (int k = 0; k < arity; ++k) {
        const int idx = static_cast<int>(rest % g);
        rest /= g;
        factor_w[k] = w[idx];
        factor_s[k] = (idx == to) ? 1.0 : (idx == from) ? -1.0 : 0.0;
      }
      acc.assign(acc.size(), 0.0);
      acc[0] = values[static_cast<size_t>(t)];
      int degree = 0;
      for (int k = 0; k < arity; ++k) {
        for (int d = degree; d >= 0; --d) {
          const double v = acc[static_cast<size_t>(d)];
          acc[static_cast<size_t>(d)] = v * factor_w[k];
          acc[static_cast<size_t>(d) + 1] += v * factor_s[k];
        }
        ++degree;
      }
      for (int d = 0; d <= arity; ++d) poly[static_cast<size_t>(d)] += acc[static_cast<size_t>(d)];
    }
    return poly;
  };
  auto eval_poly = [&](const std::vector<double>& poly, double delta) {
    double v = 0.0;
    for (size_t d = poly.size(); d-- > 0;) v = v * delta + poly[d];
    return v;
  };
  auto feasible = [&](const Eigen::VectorXd& w) {
    return transport_ball_cost(grid, w, nominal, cost, options.cost_power) <=
           rho + 1e-9;
  };

  // anchor: the cheapest grid-supported distribution w.r.t. the ball center
  Eigen::VectorXd anchor = Eigen::VectorXd::Zero(g);
  for (int j = 0; j < nominal.size(); ++j) {
    int best = 0;
    double best_cost = kInf;
    for (int i = 0; i < g; ++i) {
      const double base =
          norm_of(cost.norm, grid.row(i).transpose() - nominal.atom(j));
      const double c =
          (options.cost_power == GroundCostPower::SquaredNorm) ? base * base
                                                               : base;
      if (c < best_cost) {
        best_cost = c;
        best = i;
      }
    }
    anchor[best] += nominal.weights()[j];
  }
  require(feasible(anchor), ErrorKind::InvalidArgument,
          "no grid-supported distribution lies in the transport ball");

  double best_value = -kInf;

  for (int restart = 0; restart < std::max(1, options.restarts); ++restart) {
    // per-restart stream derived from the master seed, so restarts are
    // order-independent and could run concurrently
    std::mt19937_64 rng((options.seed + restart) * 0x9E3779B97F4A7C15ULL +
                        0x2545F4914F6CDD1DULL);
    auto uniform = [&rng]() {
      return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };
    Eigen::VectorXd w;
    if (restart == 0) {
      w = anchor;
    } else {
      // random simplex point blended toward the anchor until feasible
      Eigen::VectorXd r(g);
      for (int i = 0; i < g; ++i) r[i] = -std::log(std::max(uniform(), 1e-300));
      r /= r.sum();
      double alpha = 1.0;
      w = r;
      while (!feasible(w) && alpha > 1e-6) {
        alpha *= 0.5;
        w = alpha * r + (1.0 - alpha) * anchor;
      }
      if (!feasible(w)) w = anchor;
    }

    double current = objective(w);
    best_value = std::max(best_value, current);
    for (int iter = 0; iter < options.max_iters; ++iter) {
      bool improved = false;
      for (int i = 0; i < g && !improved; ++i) {
        if (w[i] <= 1e-14) continue;
        for (int j = 0; j < g && !improved; ++j) {
          if (j == i) continue;
          const std::vector<double> poly = move_polynomial(w, i, j);
          double step = w[i];
          while (step > 1e-12) {
            const double val = eval_poly(poly, step);
            if (val > current + 1e-12) {
              Eigen::VectorXd cand = w;
              cand[i] -= step;
              cand[j] += step;
              if (feasible(cand)) {
                w = cand;
                current = val;
                improved = true;
                break;
              }
            }
            step *= 0.5;
          }
        }
      }
      if (!improved) break;
    }
    best_value = std::max(best_value, current);
  }
  return best_value;
}

}  // namespace swdro
