#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "swdro/distribution.hpp"
#include "swdro/loss.hpp"
#include "swdro/program.hpp"

namespace swdro {

/// Shortest decimal encoding that round-trips to the same double.
std::string format_double(double v);

/// Distribution JSON: {"atoms": [[...], ...], "weights": [...]} with atoms
/// row-major.
DiscreteDistribution parse_distribution_json(const std::string& text);
std::string distribution_to_json(const DiscreteDistribution& d);

/// Loss JSON: {"type":"vertices","H":[[a...,b],...]} or
/// {"type":"halfspaces","W":[[...]],"g":[...]}; a parametric loss adds
/// "G", "g0" and "theta_box".
PolyhedralLoss parse_loss_json(const std::string& text, int block_dim, int arity);

/// Instance JSON: {"nominal": ..., "radius": rho, "norm": "l1"|"l2"|"linf",
/// "N": ..., "loss": ..., optional "theta": {"value": [...]}}.
struct ParsedInstance {
  UQInstance uq;                                        // loss frozen at theta if given
  std::optional<ParametricPolyhedralLoss> parametric;   // present when loss has G/g0
};

ParsedInstance parse_instance_json(const std::string& text);
ParsedInstance load_instance_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Curve CSV: header "M,value,status,n_vars,n_rows,solve_ms", '.' decimal,
/// one row per point ordered by M (M = 0 is the unstructured baseline).
/// `stable_timing` zeroes solve_ms so diffs and reruns are byte-identical.
std::string curve_to_csv(const RelaxationCurve& curve, bool stable_timing = false);

/// Outer-DRO CSV: "M,theta,value,proxy,status,n_vars,n_rows,solve_ms" plus a
/// final comment line "# M_star=<m>".
std::string outer_to_csv(const OuterSweep& sweep, bool stable_timing = false);

std::string result_to_json(const CurvePoint& point);

}  // namespace swdro
