#include "swdro/program.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

namespace swdro {

namespace {

struct AffineExpr {
  std::vector<std::pair<int, double>> terms;

  void add(int var, double coef) {
    if (coef != 0.0) terms.emplace_back(var, coef);
  }
  void add_to_row(LinearRow& row, double scale = 1.0) const {
    for (const auto& [v, c] : terms) row.add(v, scale * c);
  }
  bool is_single_var() const {
    return terms.size() == 1 && terms[0].second == 1.0;
  }
};

struct BlockExprs {
  std::vector<AffineExpr> a;  // nN components
  AffineExpr b;
};

// One conjugate block: variables for [a_l; b_l] in -H, rendered per the
// representation the loss carries.  For the joint outer program the halfspace
// offsets become g0 + G theta.
BlockExprs add_membership_block(ConicProgram& p, const ConjugateBlocks& cb,
                                const std::string& tag,
                                const std::vector<int>& theta_vars,
                                const Eigen::MatrixXd* G) {
  const int na = cb.block_dim * cb.arity;
  BlockExprs out;
  out.a.resize(na);
  if (cb.rep == LossRep::Vertices) {
    const int k = static_cast<int>(cb.vertices.rows());
    std::vector<int> lam(k);
    for (int i = 0; i < k; ++i) {
      lam[i] = p.add_nonneg_var(0.0, tag + ".lam" + std::to_string(i));
    }
    auto& simplex = p.add_eq(1.0);
    for (int i = 0; i < k; ++i) simplex.add(lam[i], 1.0);
    // [a; b] = -sum_i lam_i * vertex_i
    for (int c = 0; c < na; ++c) {
      for (int i = 0; i < k; ++i) out.a[c].add(lam[i], -cb.vertices(i, c));
    }
    for (int i = 0; i < k; ++i) out.b.add(lam[i], -cb.vertices(i, na));
  } else {
    std::vector<int> avars(na);
    for (int c = 0; c < na; ++c) {
      avars[c] = p.add_var(0.0, tag + ".a" + std::to_string(c));
      out.a[c].add(avars[c], 1.0);
    }
    const int bvar = p.add_var(0.0, tag + ".b");
    out.b.add(bvar, 1.0);
    // -W [a; b] <= g(theta) = g0 + G theta
    for (int r = 0; r < cb.W.rows(); ++r) {
      auto& row = p.add_ineq(cb.g[r]);
      for (int c = 0; c < na; ++c) {
        if (cb.W(r, c) != 0.0) row.add(avars[c], -cb.W(r, c));
      }
      if (cb.W(r, na) != 0.0) row.add(bvar, -cb.W(r, na));
      if (G != nullptr) {
        for (size_t t = 0; t < theta_vars.size(); ++t) {
          if ((*G)(r, static_cast<int>(t)) != 0.0) {
            row.add(theta_vars[t], -(*G)(r, static_cast<int>(t)));
          }
        }
      }
    }
  }
  return out;
}

// || expr-block ||_dual <= mu over affine expressions.  Uses a ConeBlock when
// the components are plain variables; otherwise lowers polyhedral duals to
// rows and gives the L2 dual explicit mirror variables.
void add_dual_norm_cone(ConicProgram& p, NormKind dual,
                        const std::vector<AffineExpr>& block, int mu_var,
                        const std::string& tag) {
  const int n = static_cast<int>(block.size());
  bool plain = true;
  for (const auto& e : block) plain = plain && e.is_single_var();
  if (plain) {
    std::vector<int> vars(n);
    for (int c = 0; c < n; ++c) vars[c] = block[c].terms[0].first;
    p.add_cone(dual, std::move(vars), mu_var);
    return;
  }
  switch (dual) {
    case NormKind::Linf: {
      for (int c = 0; c < n; ++c) {
        auto& up = p.add_ineq(0.0);
        block[c].add_to_row(up, 1.0);
        up.add(mu_var, -1.0);
        auto& lo = p.add_ineq(0.0);
        block[c].add_to_row(lo, -1.0);
        lo.add(mu_var, -1.0);
      }
      return;
    }
    case NormKind::L1: {
      LinearRow sum;  // assembled last: adding rows invalidates references
      for (int c = 0; c < n; ++c) {
        const int u = p.add_nonneg_var(0.0, tag + ".u" + std::to_string(c));
        auto& up = p.add_ineq(0.0);
        block[c].add_to_row(up, 1.0);
        up.add(u, -1.0);
        auto& lo = p.add_ineq(0.0);
        block[c].add_to_row(lo, -1.0);
        lo.add(u, -1.0);
        sum.add(u, 1.0);
      }
      sum.add(mu_var, -1.0);
      p.ineq_rows.push_back(std::move(sum));
      return;
    }
    case NormKind::L2: {
      if (n == 1) {
        auto& up = p.add_ineq(0.0);
        block[0].add_to_row(up, 1.0);
        up.add(mu_var, -1.0);
        auto& lo = p.add_ineq(0.0);
        block[0].add_to_row(lo, -1.0);
        lo.add(mu_var, -1.0);
        return;
      }
      std::vector<int> mirror(n);
      for (int c = 0; c < n; ++c) {
        mirror[c] = p.add_var(0.0, tag + ".w" + std::to_string(c));
        auto& eq = p.add_eq(0.0);
        eq.add(mirror[c], 1.0);
        block[c].add_to_row(eq, -1.0);
      }
      p.add_cone(NormKind::L2, std::move(mirror), mu_var);
      return;
    }
  }
}

Eigen::VectorXd member_atom(const DiscreteDistribution& nominal,
                            const std::vector<int>& member) {
  const int d = nominal.dimension();
  Eigen::VectorXd xi(static_cast<Eigen::Index>(member.size()) * d);
  for (size_t k = 0; k < member.size(); ++k) {
    xi.segment(static_cast<Eigen::Index>(k) * d, d) = nominal.atom(member[k]);
  }
  return xi;
}

// Core of the relaxation assembly, shared by the fixed-loss builder and the
// joint outer program.
BuiltProgram assemble_relaxation(const DiscreteDistribution& nominal,
                                 double radius, const TransportCost& cost,
                                 const ConjugateBlocks& cb, int m,
                                 std::int64_t cap, const Selector& selector,
                                 const ParametricPolyhedralLoss* ploss) {
  require(radius >= 0.0, ErrorKind::InvalidArgument, "radius must be >= 0");
  const int n = cb.block_dim;
  const int arity = cb.arity;
  const std::int64_t n_tuples = static_cast<std::int64_t>(cb.tuples.tuples.size());
  const std::int64_t n_classes = multiset_count(nominal.size(), m);
  require(n_tuples * n_classes * (static_cast<std::int64_t>(n) * arity + 1) <= cap,
          ErrorKind::CapExceeded,
          "relaxation needs " +
              std::to_string(n_tuples * n_classes *
                             (static_cast<std::int64_t>(n) * arity + 1)) +
              " block scalars, cap " + std::to_string(cap));

  std::vector<MultiIndexClass> classes =
      enumerate_classes(nominal.size(), m, nominal.weights(), cap);
  const NormKind dual = dual_norm(cost.norm);
  const double coef = cb.coefficient;

  BuiltProgram built;
  ConicProgram& p = built.program;
  built.n_classes = static_cast<int>(classes.size());
  built.n_tuples = static_cast<int>(n_tuples);

  const int mu = p.add_nonneg_var(m * radius, "mu");
  built.mu_var = mu;

  if (ploss != nullptr) {
    const int pd = ploss->theta_dim();
    for (int t = 0; t < pd; ++t) {
      const int v = p.add_var(0.0, "theta" + std::to_string(t));
      built.theta_vars.push_back(v);
      auto& up = p.add_ineq(ploss->theta_box()(t, 1));
      up.add(v, 1.0);
      auto& lo = p.add_ineq(-ploss->theta_box()(t, 0));
      lo.add(v, -1.0);
    }
  }

  const bool keep_z = cb.rep == LossRep::Vertices;

  for (size_t ci = 0; ci < classes.size(); ++ci) {
    const auto& cls = classes[ci];
    const std::string ctag = "c" + std::to_string(ci);
    const int sigma = p.add_var(cls.weight, ctag + ".sigma");

    std::vector<int> member =
        selector ? selector(cls) : canonical_selector(cls);
    require(static_cast<int>(member.size()) == m, ErrorKind::InvalidArgument,
            "selector returned a tuple of the wrong length");
    {
      std::vector<int> sorted = member;
      std::sort(sorted.begin(), sorted.end());
      require(sorted == cls.representative, ErrorKind::InvalidArgument,
              "selector returned a member of a different class");
    }
    const Eigen::VectorXd xi = member_atom(nominal, member);

    // z as affine expressions: coef * sum_l E_l^T a_l, optionally bound to
    // explicit variables.
    std::vector<AffineExpr> z(static_cast<size_t>(n) * m);
    std::vector<BlockExprs> block_exprs;
    block_exprs.reserve(cb.tuples.tuples.size());
    for (size_t li = 0; li < cb.tuples.tuples.size(); ++li) {
      block_exprs.push_back(
          add_membership_block(p, cb, ctag + ".l" + std::to_string(li),
                               built.theta_vars,
                               ploss ? &ploss->G() : nullptr));
      const auto& tuple = cb.tuples.tuples[li];
      const auto& a = block_exprs.back().a;
      for (int k = 0; k < arity; ++k) {
        for (int c = 0; c < n; ++c) {
          for (const auto& [v, w] : a[static_cast<size_t>(k) * n + c].terms) {
            z[static_cast<size_t>(tuple[k]) * n + c].add(v, coef * w);
          }
        }
      }
    }
    if (keep_z) {
      for (int j = 0; j < m; ++j) {
        for (int c = 0; c < n; ++c) {
          const int zv = p.add_var(
              0.0, ctag + ".z" + std::to_string(j) + "_" + std::to_string(c));
          auto& eq = p.add_eq(0.0);
          eq.add(zv, 1.0);
          for (const auto& [v, w] : z[static_cast<size_t>(j) * n + c].terms) {
            eq.add(v, -w);
          }
          z[static_cast<size_t>(j) * n + c].terms.assign({{zv, 1.0}});
        }
      }
    }

    // 0 <= sigma + z . xi + coef * sum_l b_l
    auto& srow = p.add_ineq(0.0);
    srow.add(sigma, -1.0);
    for (int c = 0; c < n * m; ++c) {
      for (const auto& [v, w] : z[c].terms) srow.add(v, -w * xi[c]);
    }
    for (const auto& be : block_exprs) be.b.add_to_row(srow, -coef);

    for (int j = 0; j < m; ++j) {
      std::vector<AffineExpr> zj(z.begin() + static_cast<Eigen::Index>(j) * n,
                                 z.begin() + static_cast<Eigen::Index>(j + 1) * n);
      add_dual_norm_cone(p, dual, zj, mu,
                         ctag + ".j" + std::to_string(j));
    }
  }
  return built;
}

}  // namespace

void UQInstance::validate() const {
  require(arity >= 1, ErrorKind::InvalidArgument, "arity must be >= 1");
  require(loss.arity() == arity, ErrorKind::DimensionMismatch,
          "loss arity does not match instance arity");
  require(loss.block_dim() == nominal.dimension(), ErrorKind::DimensionMismatch,
          "loss block dimension does not match the nominal distribution");
  require(cost.dimension == nominal.dimension(), ErrorKind::DimensionMismatch,
          "cost dimension does not match the nominal distribution");
  require(radius >= 0.0, ErrorKind::InvalidArgument, "radius must be >= 0");
}

BuiltProgram build_relaxation(const UQInstance& instance, int m,
                              std::int64_t cap, const Selector& selector) {
  instance.validate();
  require(m >= instance.arity, ErrorKind::InvalidArgument,
          "lifting parameter must satisfy M >= N");
  ConjugateBlocks cb = conjugate_membership_blocks(instance.loss, m, cap);
  return assemble_relaxation(instance.nominal, instance.radius, instance.cost,
                             cb, m, cap, selector, nullptr);
}

BuiltProgram build_unstructured(const UQInstance& instance, std::int64_t cap) {
  instance.validate();
  const int n = instance.loss.block_dim();
  const int arity = instance.arity;
  DiscreteDistribution prod = product_power(instance.nominal, arity, cap);
  const NormKind dual = dual_norm(instance.cost.norm);

  // single-tuple conjugate blocks: [z_i; b_i] in -H directly
  ConjugateBlocks cb = conjugate_membership_blocks(instance.loss, arity, cap);

  BuiltProgram built;
  ConicProgram& p = built.program;
  built.n_classes = prod.size();
  built.n_tuples = 1;

  const int mu = p.add_nonneg_var(arity * instance.radius, "mu");
  built.mu_var = mu;

  for (int i = 0; i < prod.size(); ++i) {
    const std::string tag = "atom" + std::to_string(i);
    const int sigma = p.add_var(prod.weights()[i], tag + ".sigma");
    // restrict to the identity tuple
    ConjugateBlocks single = cb;
    single.tuples.tuples.assign(1, [&] {
      std::vector<int> t(arity);
      for (int k = 0; k < arity; ++k) t[k] = k;
      return t;
    }());
    single.coefficient = 1.0;
    BlockExprs be = add_membership_block(p, single, tag, {}, nullptr);

    const Eigen::VectorXd xi = prod.atom(i);
    auto& srow = p.add_ineq(0.0);
    srow.add(sigma, -1.0);
    for (int c = 0; c < n * arity; ++c) {
      for (const auto& [v, w] : be.a[c].terms) srow.add(v, -w * xi[c]);
    }
    be.b.add_to_row(srow, -1.0);

    for (int j = 0; j < arity; ++j) {
      std::vector<AffineExpr> zj(be.a.begin() + static_cast<Eigen::Index>(j) * n,
                                 be.a.begin() + static_cast<Eigen::Index>(j + 1) * n);
      add_dual_norm_cone(p, dual, zj, mu, tag + ".j" + std::to_string(j));
    }
  }
  return built;
}

BuiltProgram build_multitransport(const UQInstance& instance, std::int64_t cap) {
  instance.validate();
  const int n = instance.loss.block_dim();
  const int arity = instance.arity;
  DiscreteDistribution prod = product_power(instance.nominal, arity, cap);
  const NormKind dual = dual_norm(instance.cost.norm);
  ConjugateBlocks cb = conjugate_membership_blocks(instance.loss, arity, cap);

  BuiltProgram built;
  ConicProgram& p = built.program;
  built.n_classes = prod.size();
  built.n_tuples = 1;

  std::vector<int> mus(arity);
  for (int k = 0; k < arity; ++k) {
    mus[k] = p.add_nonneg_var(instance.radius, "mu" + std::to_string(k));
  }
  built.mu_var = mus[0];

  for (int i = 0; i < prod.size(); ++i) {
    const std::string tag = "atom" + std::to_string(i);
    const int sigma = p.add_var(prod.weights()[i], tag + ".sigma");
    ConjugateBlocks single = cb;
    single.tuples.tuples.assign(1, [&] {
      std::vector<int> t(arity);
      for (int k = 0; k < arity; ++k) t[k] = k;
      return t;
    }());
    single.coefficient = 1.0;
    BlockExprs be = add_membership_block(p, single, tag, {}, nullptr);

    const Eigen::VectorXd xi = prod.atom(i);
    auto& srow = p.add_ineq(0.0);
    srow.add(sigma, -1.0);
    for (int c = 0; c < n * arity; ++c) {
      for (const auto& [v, w] : be.a[c].terms) srow.add(v, -w * xi[c]);
    }
    be.b.add_to_row(srow, -1.0);

    for (int j = 0; j < arity; ++j) {
      std::vector<AffineExpr> zj(be.a.begin() + static_cast<Eigen::Index>(j) * n,
                                 be.a.begin() + static_cast<Eigen::Index>(j + 1) * n);
      add_dual_norm_cone(p, dual, zj, mus[j], tag + ".j" + std::to_string(j));
    }
  }
  return built;
}

BuiltProgram build_outer_dro(const ParametricPolyhedralLoss& ploss,
                             const DiscreteDistribution& nominal, double radius,
                             const TransportCost& cost, int arity, int m,
                             std::int64_t cap) {
  require(ploss.arity() == arity, ErrorKind::DimensionMismatch,
          "parametric loss arity mismatch");
  require(ploss.block_dim() == nominal.dimension(), ErrorKind::DimensionMismatch,
          "parametric loss block dimension mismatch");
  require(m >= arity, ErrorKind::InvalidArgument, "need M >= N");

  ConjugateBlocks cb;
  cb.block_dim = ploss.block_dim();
  cb.arity = arity;
  cb.lift = m;
  cb.tuples = enumerate_tuples(m, arity, cap);
  cb.coefficient = 1.0 / static_cast<double>(falling_factorial(m, arity));
  cb.rep = LossRep::Halfspaces;
  cb.W = ploss.W();
  cb.g = ploss.g0();

  return assemble_relaxation(nominal, radius, cost, cb, m, cap, nullptr,
                             &ploss);
}

ProgramValue solve_program(const BuiltProgram& built,
                           const SolveOptions& options) {
  ProgramValue out;
  out.result = solve(built.program, options);
  out.status = out.result.status;
  switch (out.result.status) {
    case SolveStatus::Optimal:
      out.value = out.result.value;
      break;
    case SolveStatus::Unbounded:
    case SolveStatus::Infeasible:
      // the UQ supremum is infinite; never clamp
      out.value = std::numeric_limits<double>::infinity();
      break;
    case SolveStatus::IterationLimit:
      out.value = std::numeric_limits<double>::quiet_NaN();
      break;
  }
  return out;
}

double RelaxationCurve::monotonicity_violation() const {
  double worst = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& pt : points) {
    if (pt.m == 0 || pt.status != "Optimal") continue;
    worst = std::max(worst, pt.value - prev);
    prev = pt.value;
  }
  return worst;
}

namespace {

CurvePoint solve_curve_point(const UQInstance& instance, int m,
                             const SweepOptions& options) {
  CurvePoint pt;
  pt.m = m;
  try {
    BuiltProgram built = (m == 0)
                             ? build_unstructured(instance, options.cap)
                             : build_relaxation(instance, m, options.cap);
    pt.n_vars = built.program.n_vars;
    pt.n_rows = built.program.n_rows();
    ProgramValue pv = solve_program(built, options.solve);
    pt.value = pv.value;
    pt.status = to_string(pv.status);
    pt.solve_ms = pv.result.wall_ms;
  } catch (const Error& e) {
    pt.value = std::numeric_limits<double>::quiet_NaN();
    pt.status = to_string(e.kind());
  }
  return pt;
}

}  // namespace

RelaxationCurve sweep_relaxation(const UQInstance& instance,
                                 const std::vector<int>& m_range,
                                 const SweepOptions& options) {
  require(!m_range.empty(), ErrorKind::InvalidArgument, "empty M range");
  std::vector<int> ms = m_range;
  std::sort(ms.begin(), ms.end());
  if (options.include_unstructured) ms.insert(ms.begin(), 0);

  RelaxationCurve curve;
  curve.points.resize(ms.size());
  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    for (size_t i = 0; i < ms.size(); ++i) {
      curve.points[i] = solve_curve_point(instance, ms[i], options);
    }
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int t = 0; t < jobs; ++t) {
      pool.emplace_back([&] {
        while (true) {
          const size_t i = next.fetch_add(1);
          if (i >= ms.size()) return;
          curve.points[i] = solve_curve_point(instance, ms[i], options);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return curve;
}

OuterSweep sweep_outer_dro(const ParametricPolyhedralLoss& ploss,
                           const DiscreteDistribution& nominal, double radius,
                           const TransportCost& cost, int arity,
                           const std::vector<int>& m_range, int m_proxy,
                           const SweepOptions& options) {
  require(!m_range.empty(), ErrorKind::InvalidArgument, "empty M range");
  std::vector<int> ms = m_range;
  std::sort(ms.begin(), ms.end());

  OuterSweep sweep;
  for (int m : ms) {
    OuterPoint pt;
    pt.m = m;
    try {
      BuiltProgram built =
          build_outer_dro(ploss, nominal, radius, cost, arity, m, options.cap);
      pt.n_vars = built.program.n_vars;
      pt.n_rows = built.program.n_rows();
      ProgramValue pv = solve_program(built, options.solve);
      pt.value = pv.value;
      pt.status = to_string(pv.status);
      pt.solve_ms = pv.result.wall_ms;
      if (pv.status == SolveStatus::Optimal) {
        pt.theta.resize(built.theta_vars.size());
        for (size_t t = 0; t < built.theta_vars.size(); ++t) {
          pt.theta[static_cast<Eigen::Index>(t)] =
              pv.result.primal[built.theta_vars[t]];
        }
      }
    } catch (const Error& e) {
      pt.value = std::numeric_limits<double>::quiet_NaN();
      pt.status = to_string(e.kind());
    }
    sweep.points.push_back(std::move(pt));
  }

  // proxy for the true objective: the relaxation at the largest lift,
  // evaluated at each frozen decision
  sweep.proxy.assign(sweep.points.size(),
                     std::numeric_limits<double>::quiet_NaN());
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < sweep.points.size(); ++i) {
    const auto& pt = sweep.points[i];
    if (pt.status != "Optimal") continue;
    try {
      UQInstance frozen{nominal, radius, cost, ploss.at(pt.theta), arity};
      BuiltProgram built = build_relaxation(frozen, m_proxy, options.cap);
      ProgramValue pv = solve_program(built, options.solve);
      sweep.proxy[i] = pv.value;
      if (pv.status == SolveStatus::Optimal && pv.value < best) {
        best = pv.value;
        sweep.m_star = pt.m;
      }
    } catch (const Error&) {
      // leave the proxy as NaN
    }
  }
  return sweep;
}

double product_expectation(const DiscreteDistribution& nominal,
                           const PolyhedralLoss& loss, std::int64_t cap) {
  DiscreteDistribution prod = product_power(nominal, loss.arity(), cap);
  double total = 0.0;
  for (int i = 0; i < prod.size(); ++i) {
    total += prod.weights()[i] * loss.eval(prod.atom(i));
  }
  return total;
}

}  // namespace swdro
