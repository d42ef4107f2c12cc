#include "swdro/conic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

namespace swdro {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NegativeWeight: return "NegativeWeight";
    case ErrorKind::ZeroTotalMass: return "ZeroTotalMass";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotAProbabilityVector: return "NotAProbabilityVector";
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::UnboundedPolytope: return "UnboundedPolytope";
    case ErrorKind::EmptyTheta: return "EmptyTheta";
    case ErrorKind::EmptyGrid: return "EmptyGrid";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::SolverFailure: return "SolverFailure";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

const char* to_string(NormKind kind) {
  switch (kind) {
    case NormKind::L1: return "l1";
    case NormKind::L2: return "l2";
    case NormKind::Linf: return "linf";
  }
  return "?";
}

NormKind norm_kind_from_string(const std::string& s) {
  if (s == "l1" || s == "L1") return NormKind::L1;
  if (s == "l2" || s == "L2") return NormKind::L2;
  if (s == "linf" || s == "Linf" || s == "LInf") return NormKind::Linf;
  fail(ErrorKind::ParseError, "unknown norm kind '" + s + "'");
}

NormKind dual_norm(NormKind kind) {
  switch (kind) {
    case NormKind::L1: return NormKind::Linf;
    case NormKind::L2: return NormKind::L2;
    case NormKind::Linf: return NormKind::L1;
  }
  return NormKind::L2;
}

double norm_of(NormKind kind, const Eigen::VectorXd& v) {
  switch (kind) {
    case NormKind::L1: return v.lpNorm<1>();
    case NormKind::L2: return v.norm();
    case NormKind::Linf: return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0;
  }
  return 0.0;
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::IterationLimit: return "IterationLimit";
  }
  return "?";
}

int ConicProgram::add_var(double obj, std::string name) {
  objective.push_back(obj);
  var_names.push_back(std::move(name));
  return n_vars++;
}

int ConicProgram::add_nonneg_var(double obj, std::string name) {
  const int v = add_var(obj, std::move(name));
  nonneg_vars.push_back(v);
  return v;
}

LinearRow& ConicProgram::add_eq(double rhs) {
  eq_rows.push_back({});
  eq_rows.back().rhs = rhs;
  return eq_rows.back();
}

LinearRow& ConicProgram::add_ineq(double rhs) {
  ineq_rows.push_back({});
  ineq_rows.back().rhs = rhs;
  return ineq_rows.back();
}

void ConicProgram::add_cone(NormKind kind, std::vector<int> vars, int bound) {
  cones.push_back({kind, std::move(vars), bound});
}

void ConicProgram::validate() const {
  require(static_cast<int>(objective.size()) == n_vars,
          ErrorKind::InvalidArgument, "objective size mismatch");
  auto check_row = [&](const LinearRow& row) {
    require(row.idx.size() == row.coef.size(), ErrorKind::InvalidArgument,
            "row index/coefficient size mismatch");
    for (int i : row.idx) {
      require(i >= 0 && i < n_vars, ErrorKind::InvalidArgument,
              "row references variable out of range");
    }
  };
  for (const auto& row : eq_rows) check_row(row);
  for (const auto& row : ineq_rows) check_row(row);
  for (const auto& cone : cones) {
    require(cone.bound >= 0 && cone.bound < n_vars, ErrorKind::InvalidArgument,
            "cone bound variable out of range");
    for (int i : cone.vars) {
      require(i >= 0 && i < n_vars, ErrorKind::InvalidArgument,
              "cone references variable out of range");
    }
  }
  for (int i : nonneg_vars) {
    require(i >= 0 && i < n_vars, ErrorKind::InvalidArgument,
            "nonnegative variable out of range");
  }
}

namespace {

struct Lowered {
  detail::IpmProblem problem;
  int n_original = 0;
  int n_ineq_rows = 0;  // leading orthant rows that mirror ineq_rows
};

// Maps the builder-facing program onto the IPM form.  L1/Linf cones are
// polyhedral and become orthant rows (L1 adds one aux variable per vector
// entry); L2 cones of vector length 1 are two orthant rows; longer L2 cones
// become second-order cone slacks.
Lowered lower(const ConicProgram& p) {
  Lowered low;
  low.n_original = p.n_vars;
  int n_total = p.n_vars;
  for (const auto& cone : p.cones) {
    if (cone.kind == NormKind::L1) n_total += static_cast<int>(cone.vars.size());
  }

  std::vector<Eigen::Triplet<double>> a_entries, g_entries;
  std::vector<double> b, h;

  for (const auto& row : p.eq_rows) {
    const int r = static_cast<int>(b.size());
    for (size_t i = 0; i < row.idx.size(); ++i) {
      a_entries.emplace_back(r, row.idx[i], row.coef[i]);
    }
    b.push_back(row.rhs);
  }

  // orthant rows: a.x <= rhs  ->  s = rhs - a.x >= 0
  auto add_orthant = [&](const std::vector<std::pair<int, double>>& terms,
                         double rhs) {
    const int r = static_cast<int>(h.size());
    for (const auto& [var, coef] : terms) g_entries.emplace_back(r, var, coef);
    h.push_back(rhs);
  };

  for (const auto& row : p.ineq_rows) {
    std::vector<std::pair<int, double>> terms;
    for (size_t i = 0; i < row.idx.size(); ++i) {
      terms.emplace_back(row.idx[i], row.coef[i]);
    }
    add_orthant(terms, row.rhs);
  }
  low.n_ineq_rows = static_cast<int>(h.size());

  for (int v : p.nonneg_vars) add_orthant({{v, -1.0}}, 0.0);

  int next_aux = p.n_vars;
  std::vector<const ConeBlock*> soc_blocks;
  for (const auto& cone : p.cones) {
    const int k = static_cast<int>(cone.vars.size());
    if (k == 0) {
      add_orthant({{cone.bound, -1.0}}, 0.0);
      continue;
    }
    switch (cone.kind) {
      case NormKind::Linf:
        for (int v : cone.vars) {
          add_orthant({{v, 1.0}, {cone.bound, -1.0}}, 0.0);
          add_orthant({{v, -1.0}, {cone.bound, -1.0}}, 0.0);
        }
        break;
      case NormKind::L1: {
        std::vector<std::pair<int, double>> sum_row;
        for (int v : cone.vars) {
          const int u = next_aux++;
          add_orthant({{v, 1.0}, {u, -1.0}}, 0.0);
          add_orthant({{v, -1.0}, {u, -1.0}}, 0.0);
          sum_row.emplace_back(u, 1.0);
        }
        sum_row.emplace_back(cone.bound, -1.0);
        add_orthant(sum_row, 0.0);
        break;
      }
      case NormKind::L2:
        if (k == 1) {
          add_orthant({{cone.vars[0], 1.0}, {cone.bound, -1.0}}, 0.0);
          add_orthant({{cone.vars[0], -1.0}, {cone.bound, -1.0}}, 0.0);
        } else {
          soc_blocks.push_back(&cone);
        }
        break;
    }
  }

  low.problem.cone.n_nonneg = static_cast<int>(h.size());
  // guard for programs with no inequality part at all
  if (h.empty() && soc_blocks.empty()) {
    h.push_back(1.0);
    low.problem.cone.n_nonneg = 1;
  }

  for (const ConeBlock* cone : soc_blocks) {
    const int r = static_cast<int>(h.size());
    g_entries.emplace_back(r, cone->bound, -1.0);
    h.push_back(0.0);
    for (size_t i = 0; i < cone->vars.size(); ++i) {
      g_entries.emplace_back(r + 1 + static_cast<int>(i), cone->vars[i], -1.0);
      h.push_back(0.0);
    }
    low.problem.cone.soc_dims.push_back(static_cast<int>(cone->vars.size()) + 1);
  }

  low.problem.A.resize(static_cast<int>(b.size()), n_total);
  low.problem.A.setFromTriplets(a_entries.begin(), a_entries.end());
  low.problem.G.resize(static_cast<int>(h.size()), n_total);
  low.problem.G.setFromTriplets(g_entries.begin(), g_entries.end());
  low.problem.b = Eigen::Map<Eigen::VectorXd>(b.data(), b.size());
  low.problem.h = Eigen::Map<Eigen::VectorXd>(h.data(), h.size());
  low.problem.c = Eigen::VectorXd::Zero(n_total);
  for (int i = 0; i < p.n_vars; ++i) low.problem.c[i] = p.objective[i];
  return low;
}

// Standard-form conversion for the dense simplex fallback: free variables are
// split, inequality rows get slacks.
detail::StandardFormLP to_standard_form(const Lowered& low,
                                        std::vector<int>& pos_index,
                                        std::vector<int>& neg_index) {
  const auto& pr = low.problem;
  const int n = static_cast<int>(pr.c.size());
  const int me = static_cast<int>(pr.b.size());
  const int mi = static_cast<int>(pr.h.size());

  pos_index.assign(n, -1);
  neg_index.assign(n, -1);
  int cols = 0;
  for (int i = 0; i < n; ++i) {
    pos_index[i] = cols++;
    neg_index[i] = cols++;
  }
  const int slack0 = cols;
  cols += mi;

  detail::StandardFormLP lp;
  lp.A = Eigen::MatrixXd::Zero(me + mi, cols);
  lp.b = Eigen::VectorXd::Zero(me + mi);
  lp.c = Eigen::VectorXd::Zero(cols);

  Eigen::MatrixXd Ad = Eigen::MatrixXd(pr.A);
  Eigen::MatrixXd Gd = Eigen::MatrixXd(pr.G);
  for (int i = 0; i < n; ++i) {
    lp.A.col(pos_index[i]).head(me) = Ad.col(i);
    lp.A.col(neg_index[i]).head(me) = -Ad.col(i);
    lp.A.col(pos_index[i]).tail(mi) = Gd.col(i);
    lp.A.col(neg_index[i]).tail(mi) = -Gd.col(i);
    lp.c[pos_index[i]] = pr.c[i];
    lp.c[neg_index[i]] = -pr.c[i];
  }
  for (int r = 0; r < mi; ++r) lp.A(me + r, slack0 + r) = 1.0;
  lp.b.head(me) = pr.b;
  lp.b.tail(mi) = pr.h;
  return lp;
}

SolveResult from_simplex(const Lowered& low, const detail::SimplexResult& sr) {
  SolveResult out;
  out.status = sr.status;
  out.iterations = sr.iterations;
  const int n = low.n_original;
  if (sr.status == SolveStatus::Optimal || sr.status == SolveStatus::Unbounded) {
    const Eigen::VectorXd& v =
        (sr.status == SolveStatus::Optimal) ? sr.x : sr.ray;
    out.primal.resize(n);
    for (int i = 0; i < n; ++i) out.primal[i] = v[2 * i] - v[2 * i + 1];
  }
  if (sr.status == SolveStatus::Optimal) {
    out.value = 0.0;
    for (int i = 0; i < n; ++i) {
      // objective over original variables only; aux variables carry none
      out.value += low.problem.c[i] * out.primal[i];
    }
    out.dual_value = out.value;
    // standard-form duals flip sign against the Lagrangian convention
    const int me = static_cast<int>(low.problem.b.size());
    out.dual_eq = -sr.dual.head(me);
    out.dual_ineq = -sr.dual.segment(me, low.n_ineq_rows);
    out.primal_residual = 0.0;
    out.relative_gap = 0.0;
  }
  return out;
}

}  // namespace

SolveResult solve(const ConicProgram& program, const SolveOptions& options) {
  program.validate();
  const auto t0 = std::chrono::steady_clock::now();
  Lowered low = lower(program);

  SolveResult out;
  bool ipm_ok = true;
  std::string ipm_message;
  try {
    detail::IpmResult res = detail::ipm_solve(low.problem, options);
    out.status = res.status;
    out.iterations = res.iterations;
    if (res.status == SolveStatus::Optimal) {
      out.primal = res.x.head(low.n_original);
      out.value = res.primal_obj;
      out.dual_value = res.dual_obj;
      out.dual_eq = res.y;
      out.dual_ineq = res.z.head(low.n_ineq_rows);
      out.primal_residual = res.primal_residual;
      out.relative_gap = res.relative_gap;
    } else if (res.status == SolveStatus::Unbounded) {
      out.primal = res.x.head(low.n_original);
    } else if (res.status == SolveStatus::IterationLimit) {
      ipm_ok = false;
      ipm_message = "iteration limit reached";
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NumericalFailure) throw;
    ipm_ok = false;
    ipm_message = e.what();
  }

  if (!ipm_ok) {
    // dense simplex fallback for pure LPs of modest size
    const bool pure_lp = low.problem.cone.soc_dims.empty();
    if (pure_lp && low.n_original <= 2000) {
      std::vector<int> pos, neg;
      detail::StandardFormLP lp = to_standard_form(low, pos, neg);
      detail::SimplexResult sr = detail::simplex_solve(lp);
      if (sr.status == SolveStatus::Optimal ||
          sr.status == SolveStatus::Unbounded ||
          sr.status == SolveStatus::Infeasible) {
        out = from_simplex(low, sr);
      } else {
        fail(ErrorKind::NumericalFailure,
             "interior point failed (" + ipm_message + ") and simplex hit its "
             "iteration limit");
      }
    } else {
      fail(ErrorKind::NumericalFailure,
           "interior point failed: " + ipm_message);
    }
  }

  const auto t1 = std::chrono::steady_clock::now();
  out.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return out;
}

TransportSolution solve_transport(const Eigen::MatrixXd& costs,
                                  const Eigen::VectorXd& supply,
                                  const Eigen::VectorXd& demand) {
  const int n = static_cast<int>(supply.size());
  const int m = static_cast<int>(demand.size());
  require(costs.rows() == n && costs.cols() == m, ErrorKind::DimensionMismatch,
          "cost matrix shape does not match the marginals");
  require((supply.array() >= -1e-12).all() && (demand.array() >= -1e-12).all(),
          ErrorKind::NegativeWeight, "transport marginals must be nonnegative");
  const double ssum = supply.sum(), dsum = demand.sum();
  require(std::abs(ssum - dsum) <= 1e-9 * std::max(1.0, std::abs(ssum)),
          ErrorKind::NotAProbabilityVector,
          "supply and demand masses differ beyond tolerance");

  // variables: plan entries row-major; equality rows: n supplies plus m-1
  // demands (the last demand row is redundant).
  detail::StandardFormLP lp;
  const int rows = n + m - 1;
  lp.A = Eigen::MatrixXd::Zero(rows, n * m);
  lp.b = Eigen::VectorXd::Zero(rows);
  lp.c = Eigen::VectorXd::Zero(n * m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const int v = i * m + j;
      lp.c[v] = costs(i, j);
      lp.A(i, v) = 1.0;
      if (j < m - 1) lp.A(n + j, v) = 1.0;
    }
  }
  lp.b.head(n) = supply;
  // rescale so both sides carry exactly the supply mass
  lp.b.tail(m - 1) = demand.head(m - 1) * (ssum / dsum);

  // northwest-corner spanning basis: n + m - 1 cells, skips simplex phase 1
  std::vector<int> basis;
  basis.reserve(rows);
  {
    Eigen::VectorXd s = lp.b.head(n);
    Eigen::VectorXd d(m);
    d.head(m - 1) = lp.b.tail(m - 1);
    d[m - 1] = std::max(0.0, ssum - d.head(m - 1).sum());
    int i = 0, j = 0;
    while (static_cast<int>(basis.size()) < rows) {
      basis.push_back(i * m + j);
      const double moved = std::min(s[i], d[j]);
      s[i] -= moved;
      d[j] -= moved;
      if (i == n - 1) {
        ++j;
      } else if (j == m - 1) {
        ++i;
      } else if (s[i] <= d[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  detail::SimplexResult sr = detail::simplex_solve(lp, 50000, &basis);
  if (sr.status != SolveStatus::Optimal) {
    fail(ErrorKind::NumericalFailure,
         std::string("transport simplex returned ") + to_string(sr.status));
  }
  TransportSolution out;
  out.value = sr.value;
  out.plan = Eigen::MatrixXd::Zero(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) out.plan(i, j) = sr.x[i * m + j];
  }
  return out;
}

void write_lp(const ConicProgram& p, std::ostream& out) {
  auto name = [&](int v) {
    if (v < static_cast<int>(p.var_names.size()) && !p.var_names[v].empty()) {
      return p.var_names[v];
    }
    return "x" + std::to_string(v);
  };
  auto row_text = [&](const LinearRow& row) {
    std::ostringstream os;
    for (size_t i = 0; i < row.idx.size(); ++i) {
      const double c = row.coef[i];
      os << (c < 0 ? " - " : (i ? " + " : " ")) << std::abs(c) << " "
         << name(row.idx[i]);
    }
    return os.str();
  };

  out << "\\ generated by swdro::write_lp\n";
  out << "Minimize\n obj:";
  bool first = true;
  for (int i = 0; i < p.n_vars; ++i) {
    const double c = p.objective[i];
    if (c == 0.0) continue;
    out << (c < 0 ? " - " : (first ? " " : " + ")) << std::abs(c) << " "
        << name(i);
    first = false;
  }
  if (first) out << " 0 " << (p.n_vars ? name(0) : "x0");
  out << "\nSubject To\n";
  int r = 0;
  for (const auto& row : p.eq_rows) {
    out << " e" << r++ << ":" << row_text(row) << " = " << row.rhs << "\n";
  }
  r = 0;
  for (const auto& row : p.ineq_rows) {
    out << " i" << r++ << ":" << row_text(row) << " <= " << row.rhs << "\n";
  }
  r = 0;
  for (const auto& cone : p.cones) {
    const bool componentwise =
        cone.kind == NormKind::Linf ||
        (cone.kind == NormKind::L2 && cone.vars.size() <= 1);
    if (!componentwise) {
      // L2 balls and L1 sums need auxiliaries that the program does not
      // carry; emit them as comments for the external reader
      out << "\\ cone q" << r++ << ": ||(";
      for (size_t i = 0; i < cone.vars.size(); ++i) {
        out << (i ? "," : "") << name(cone.vars[i]);
      }
      out << ")||_" << (cone.kind == NormKind::L1 ? "1" : "2") << " <= "
          << name(cone.bound) << "\n";
      continue;
    }
    for (int v : cone.vars) {
      out << " c" << r << "a_" << v << ": " << name(v) << " - " << name(cone.bound)
          << " <= 0\n";
      out << " c" << r << "b_" << v << ": - " << name(v) << " - "
          << name(cone.bound) << " <= 0\n";
    }
    ++r;
  }
  out << "Bounds\n";
  std::vector<bool> nonneg(p.n_vars, false);
  for (int v : p.nonneg_vars) nonneg[v] = true;
  for (int i = 0; i < p.n_vars; ++i) {
    if (!nonneg[i]) out << " " << name(i) << " free\n";
  }
  out << "End\n";
}

}  // namespace swdro
