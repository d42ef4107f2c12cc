// Command-line front end: instance ingestion, experiment sweeps, figure-data
// emission and fixture regeneration.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "swdro/io.hpp"
#include "swdro/oracles.hpp"
#include "swdro/program.hpp"

namespace {

using namespace swdro;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::CapExceeded:
      return 3;
    case ErrorKind::SolverFailure:
    case ErrorKind::NumericalFailure:
      return 4;
    default:
      return 2;
  }
}

std::vector<int> parse_m_range(const std::string& text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const int lo = std::stoi(text.substr(0, dots));
    const int hi = std::stoi(text.substr(dots + 2));
    require(lo <= hi, ErrorKind::InvalidArgument, "empty M range");
    for (int m = lo; m <= hi; ++m) out.push_back(m);
    return out;
  }
  size_t at = 0;
  while (at < text.size()) {
    const auto comma = text.find(',', at);
    const std::string tok =
        text.substr(at, comma == std::string::npos ? comma : comma - at);
    if (!tok.empty()) out.push_back(std::stoi(tok));
    if (comma == std::string::npos) break;
    at = comma + 1;
  }
  require(!out.empty(), ErrorKind::InvalidArgument, "empty M range");
  return out;
}

std::int64_t default_cap() {
  if (const char* env = std::getenv("STRUCT_WDRO_CAP")) {
    const long long v = std::atoll(env);
    if (v > 0) return v;
  }
  return 5'000'000;
}

struct CommonOpts {
  std::string instance_path;
  double rho_override = -1.0;
  std::int64_t cap = default_cap();
  double tol = 1e-9;
  std::string out_path;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool stable_timing = false;
};

ParsedInstance load(const CommonOpts& opts) {
  ParsedInstance parsed = load_instance_file(opts.instance_path);
  if (opts.rho_override >= 0.0) parsed.uq.radius = opts.rho_override;
  return parsed;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
}

SolveOptions solve_options(const CommonOpts& opts) {
  require(opts.tol > 0 && opts.tol <= 1e-2, ErrorKind::InvalidArgument,
          "tolerance must lie in (0, 1e-2]");
  SolveOptions so;
  so.tolerance = opts.tol;
  return so;
}

int cmd_uq(const CommonOpts& opts, int m, const std::string& dump_lp) {
  ParsedInstance parsed = load(opts);
  BuiltProgram built = build_relaxation(parsed.uq, m, opts.cap);
  if (!dump_lp.empty()) {
    std::ofstream lp(dump_lp);
    write_lp(built.program, lp);
  }
  ProgramValue pv = solve_program(built, solve_options(opts));
  CurvePoint pt{m,
                pv.value,
                to_string(pv.status),
                built.program.n_vars,
                built.program.n_rows(),
                pv.result.wall_ms};
  std::cout << "M=" << m << " value=" << format_double(pt.value)
            << " status=" << pt.status << " n_vars=" << pt.n_vars
            << " n_rows=" << pt.n_rows << " classes=" << built.n_classes
            << " tuples=" << built.n_tuples << "\n";
  if (!opts.out_path.empty()) {
    write_text_file(opts.out_path, result_to_json(pt) + "\n");
  }
  return pv.status == SolveStatus::Optimal ? 0 : 4;
}

int cmd_sweep(const CommonOpts& opts, const std::string& m_range) {
  ParsedInstance parsed = load(opts);
  SweepOptions so;
  so.cap = opts.cap;
  so.solve = solve_options(opts);
  so.jobs = opts.jobs;
  RelaxationCurve curve = sweep_relaxation(parsed.uq, parse_m_range(m_range), so);
  emit(opts.out_path, curve_to_csv(curve, opts.stable_timing));
  const double viol = curve.monotonicity_violation();
  if (viol > 10 * opts.tol) {
    std::cerr << "warning: relaxation curve is not monotone (violation "
              << format_double(viol) << ")\n";
  }
  int solved = 0;
  for (const auto& pt : curve.points) {
    if (pt.status == "Optimal") ++solved;
  }
  return solved > 0 ? 0 : 4;
}

int cmd_dro(const CommonOpts& opts, const std::string& m_range, int m_max) {
  ParsedInstance parsed = load(opts);
  require(parsed.parametric.has_value(), ErrorKind::InvalidArgument,
          "dro needs a parametric instance (loss with G, g0, theta_box)");
  std::vector<int> ms = parse_m_range(m_range);
  if (m_max <= 0) m_max = *std::max_element(ms.begin(), ms.end());
  SweepOptions so;
  so.cap = opts.cap;
  so.solve = solve_options(opts);
  so.jobs = opts.jobs;
  OuterSweep sweep =
      sweep_outer_dro(*parsed.parametric, parsed.uq.nominal, parsed.uq.radius,
                      parsed.uq.cost, parsed.uq.arity, ms, m_max, so);
  emit(opts.out_path, outer_to_csv(sweep, opts.stable_timing));
  std::cout << "M_star=" << sweep.m_star << "\n";
  int solved = 0;
  for (const auto& pt : sweep.points) {
    if (pt.status == "Optimal") ++solved;
  }
  return solved > 0 ? 0 : 4;
}

int cmd_wasserstein(const std::string& path_p, const std::string& path_q,
                    const std::string& norm, bool print_plan) {
  DiscreteDistribution p = parse_distribution_json(read_text_file(path_p));
  DiscreteDistribution q = parse_distribution_json(read_text_file(path_q));
  TransportCost cost{norm_kind_from_string(norm), p.dimension()};
  WassersteinSolution sol = wasserstein_exact(p, q, cost);
  std::cout << format_double(sol.value) << "\n";
  if (print_plan) {
    for (int i = 0; i < sol.plan.mass.rows(); ++i) {
      for (int j = 0; j < sol.plan.mass.cols(); ++j) {
        std::cout << (j ? "," : "") << format_double(sol.plan.mass(i, j));
      }
      std::cout << "\n";
    }
  }
  return 0;
}

int cmd_oracle(const std::string& name, double rho, int m) {
  if (name == "variance") {
    std::cout << "S=" << format_double(reference_value("variance_s", rho, m))
              << " U=" << format_double(reference_value("variance_u", rho, m))
              << "\n";
  } else if (name == "neg_product") {
    std::cout << "S=" << format_double(reference_value("neg_product_s", rho, m))
              << " U=" << format_double(reference_value("neg_product_u", rho, m))
              << "\n";
  } else if (name == "sym_quad") {
    std::cout << "S=" << format_double(reference_value("sym_quad_s", rho, m))
              << " U=" << format_double(reference_value("sym_quad_u", rho, m))
              << " U_sym="
              << format_double(reference_value("sym_quad_usym", rho, m)) << "\n";
  } else if (name == "cubic_gap") {
    std::cout << "S=" << format_double(reference_value("cubic_gap_s", rho, m))
              << "\n";
  } else {
    std::cout << format_double(reference_value(name, rho, m)) << "\n";
  }
  return 0;
}

int cmd_compare(const CommonOpts& opts, int m) {
  ParsedInstance parsed = load(opts);
  if (m <= 0) m = parsed.uq.arity;
  const SolveOptions so = solve_options(opts);
  ProgramValue unstructured =
      solve_program(build_unstructured(parsed.uq, opts.cap), so);
  ProgramValue relaxed =
      solve_program(build_relaxation(parsed.uq, m, opts.cap), so);
  ProgramValue multi =
      solve_program(build_multitransport(parsed.uq, opts.cap), so);
  std::cout << "U=" << format_double(unstructured.value)
            << " U_sym_M=" << format_double(relaxed.value)
            << " multitransport=" << format_double(multi.value) << "\n";
  return 0;
}

int cmd_fixtures(const std::string& out_path) {
  // case name x (rho, M) -> value over a fixed grid, for golden comparisons
  const std::vector<double> rhos = {0.1, 0.2, 0.25, 0.5, 1.0};
  const std::vector<int> ms = {2, 3, 5, 10, 25};
  std::string body = "{\n";
  bool first_case = true;
  for (const auto& c : reference_cases()) {
    if (!first_case) body += ",\n";
    first_case = false;
    body += "  \"" + c.name + "\": {";
    bool first = true;
    for (double rho : rhos) {
      for (int m : ms) {
        const double v = c.eval(rho, m);
        if (!first) body += ", ";
        first = false;
        body += "\"rho=" + format_double(rho) + ",M=" + std::to_string(m) +
                "\": " + format_double(v);
      }
    }
    body += "}";
  }
  body += "\n}\n";
  emit(out_path, body);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structured Wasserstein DRO relaxations"};
  app.require_subcommand(1);

  CommonOpts opts;
  int m = 2;
  int m_max = 0;
  std::string m_range = "2..8";
  std::string dump_lp;
  std::string norm = "l2";
  std::string path_q;
  std::string oracle_case;
  double rho = 0.25;
  bool print_plan = false;

  auto add_common = [&](CLI::App* cmd, bool needs_instance) {
    if (needs_instance) {
      cmd->add_option("--instance", opts.instance_path, "instance JSON path")
          ->required();
    }
    cmd->add_option("--rho", opts.rho_override, "override the instance radius");
    cmd->add_option("--cap", opts.cap, "variable-count cap");
    cmd->add_option("--tol", opts.tol, "solver tolerance");
    cmd->add_option("--out", opts.out_path, "output file (default stdout)");
    cmd->add_option("--seed", opts.seed, "random seed");
    cmd->add_option("--jobs", opts.jobs, "concurrent solves for sweeps");
    cmd->add_flag("--stable-timing", opts.stable_timing,
                  "zero the solve_ms column for byte-stable output");
  };

  CLI::App* uq = app.add_subcommand("uq", "solve one lifted relaxation");
  add_common(uq, true);
  uq->add_option("--M", m, "lifting parameter")->required();
  uq->add_option("--dump-lp", dump_lp, "write the assembled program in LP format");

  CLI::App* sweep = app.add_subcommand("sweep", "relaxation curve over M");
  add_common(sweep, true);
  sweep->add_option("--M-range", m_range, "e.g. 2..10 or 2,4,8")->required();

  CLI::App* dro = app.add_subcommand("dro", "outer minimization over theta");
  add_common(dro, true);
  dro->add_option("--M-range", m_range, "e.g. 2..8")->required();
  dro->add_option("--M-max", m_max, "lift used for the proxy objective");

  CLI::App* wass = app.add_subcommand("wasserstein", "exact discrete OT value");
  wass->add_option("P", opts.instance_path, "first distribution JSON")->required();
  wass->add_option("Q", path_q, "second distribution JSON")->required();
  wass->add_option("--norm", norm, "l1|l2|linf");
  wass->add_flag("--plan", print_plan, "print the optimal plan");

  CLI::App* oracle = app.add_subcommand("oracle", "closed-form reference value");
  oracle->add_option("case", oracle_case,
                     "variance|neg_product|sym_quad|cubic_gap|lifted|<full name>")
      ->required();
  oracle->add_option("--rho", rho, "ball radius")->required();
  oracle->add_option("--M", m, "lifting parameter (lifted case)");

  CLI::App* compare = app.add_subcommand(
      "compare", "unstructured vs symmetrized vs multitransport");
  add_common(compare, true);
  compare->add_option("--M", m, "lift for the symmetrized bound");

  CLI::App* fixtures =
      app.add_subcommand("fixtures", "regenerate the oracle fixture file");
  fixtures->add_option("--out", opts.out_path, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (uq->parsed()) return cmd_uq(opts, m, dump_lp);
    if (sweep->parsed()) return cmd_sweep(opts, m_range);
    if (dro->parsed()) return cmd_dro(opts, m_range, m_max);
    if (wass->parsed())
      return cmd_wasserstein(opts.instance_path, path_q, norm, print_plan);
    if (oracle->parsed()) return cmd_oracle(oracle_case, rho, m);
    if (compare->parsed()) return cmd_compare(opts, m);
    if (fixtures->parsed()) return cmd_fixtures(opts.out_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
