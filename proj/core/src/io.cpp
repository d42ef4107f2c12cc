#include "swdro/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace swdro {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::ParseError, "cannot open '" + path + "' for writing");
  out << text;
}

namespace {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ParseError, e.what());
  }
}

Eigen::MatrixXd matrix_from_json(const json& j, const char* what) {
  require(j.is_array() && !j.empty(), ErrorKind::ParseError,
          std::string(what) + " must be a nonempty array of rows");
  const int rows = static_cast<int>(j.size());
  require(j[0].is_array() && !j[0].empty(), ErrorKind::ParseError,
          std::string(what) + " rows must be nonempty arrays");
  const int cols = static_cast<int>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    require(j[r].is_array() && static_cast<int>(j[r].size()) == cols,
            ErrorKind::ParseError, std::string(what) + " rows have ragged sizes");
    for (int c = 0; c < cols; ++c) {
      require(j[r][c].is_number(), ErrorKind::ParseError,
              std::string(what) + " entries must be numbers");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

Eigen::VectorXd vector_from_json(const json& j, const char* what) {
  require(j.is_array(), ErrorKind::ParseError,
          std::string(what) + " must be an array");
  Eigen::VectorXd v(static_cast<int>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    require(j[i].is_number(), ErrorKind::ParseError,
            std::string(what) + " entries must be numbers");
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

DiscreteDistribution distribution_from_json(const json& j) {
  require(j.is_object() && j.contains("atoms") && j.contains("weights"),
          ErrorKind::ParseError,
          "distribution needs 'atoms' and 'weights' fields");
  return make_distribution(matrix_from_json(j["atoms"], "atoms"),
                           vector_from_json(j["weights"], "weights"));
}

PolyhedralLoss loss_from_json(const json& j, int block_dim, int arity) {
  require(j.is_object() && j.contains("type"), ErrorKind::ParseError,
          "loss needs a 'type' field");
  const std::string type = j["type"].get<std::string>();
  if (type == "vertices") {
    require(j.contains("H"), ErrorKind::ParseError,
            "vertex loss needs an 'H' field");
    return PolyhedralLoss::from_vertices(block_dim, arity,
                                         matrix_from_json(j["H"], "H"));
  }
  if (type == "halfspaces") {
    require(j.contains("W") && j.contains("g"), ErrorKind::ParseError,
            "halfspace loss needs 'W' and 'g' fields");
    return PolyhedralLoss::from_halfspaces(block_dim, arity,
                                           matrix_from_json(j["W"], "W"),
                                           vector_from_json(j["g"], "g"));
  }
  fail(ErrorKind::ParseError, "unknown loss type '" + type + "'");
}

}  // namespace

DiscreteDistribution parse_distribution_json(const std::string& text) {
  return distribution_from_json(parse_json(text));
}

std::string distribution_to_json(const DiscreteDistribution& d) {
  json j;
  j["atoms"] = matrix_to_json(d.atoms());
  j["weights"] = vector_to_json(d.weights());
  return j.dump();
}

PolyhedralLoss parse_loss_json(const std::string& text, int block_dim,
                               int arity) {
  return loss_from_json(parse_json(text), block_dim, arity);
}

ParsedInstance parse_instance_json(const std::string& text) {
  json j = parse_json(text);
  require(j.is_object(), ErrorKind::ParseError, "instance must be an object");
  for (const char* field : {"nominal", "radius", "norm", "N", "loss"}) {
    require(j.contains(field), ErrorKind::ParseError,
            std::string("instance misses field '") + field + "'");
  }
  DiscreteDistribution nominal = distribution_from_json(j["nominal"]);
  const double radius = j["radius"].get<double>();
  const NormKind norm = norm_kind_from_string(j["norm"].get<std::string>());
  const int arity = j["N"].get<int>();
  require(arity >= 1, ErrorKind::ParseError, "N must be >= 1");
  const int d = nominal.dimension();

  ParsedInstance out{
      UQInstance{nominal, radius, TransportCost{norm, d},
                 PolyhedralLoss::from_vertices(
                     1, 1, Eigen::MatrixXd::Zero(1, 2)),  // placeholder
                 arity},
      std::nullopt};

  const json& lj = j["loss"];
  const bool parametric = lj.is_object() && lj.contains("G");
  if (parametric) {
    require(lj.contains("W") && lj.contains("g0") && lj.contains("theta_box"),
            ErrorKind::ParseError,
            "parametric loss needs 'W', 'G', 'g0' and 'theta_box'");
    Eigen::MatrixXd box = matrix_from_json(lj["theta_box"], "theta_box");
    out.parametric = ParametricPolyhedralLoss(
        d, arity, matrix_from_json(lj["W"], "W"), matrix_from_json(lj["G"], "G"),
        vector_from_json(lj["g0"], "g0"), box);
    if (j.contains("theta") && j["theta"].is_object() &&
        j["theta"].contains("value")) {
      Eigen::VectorXd theta = vector_from_json(j["theta"]["value"], "theta");
      out.uq.loss = out.parametric->at(theta);
    } else {
      // freeze at the box midpoint so plain UQ commands remain usable
      Eigen::VectorXd theta = 0.5 * (box.col(0) + box.col(1));
      out.uq.loss = out.parametric->at(theta);
    }
  } else {
    out.uq.loss = loss_from_json(lj, d, arity);
  }
  out.uq.validate();
  return out;
}

ParsedInstance load_instance_file(const std::string& path) {
  return parse_instance_json(read_text_file(path));
}

namespace {

std::string csv_point(const CurvePoint& pt, bool stable_timing) {
  std::ostringstream os;
  os << pt.m << "," << format_double(pt.value) << "," << pt.status << ","
     << pt.n_vars << "," << pt.n_rows << ","
     << (stable_timing ? 0 : static_cast<long long>(std::llround(pt.solve_ms)));
  return os.str();
}

}  // namespace

std::string curve_to_csv(const RelaxationCurve& curve, bool stable_timing) {
  std::ostringstream os;
  os << "M,value,status,n_vars,n_rows,solve_ms\n";
  for (const auto& pt : curve.points) {
    os << csv_point(pt, stable_timing) << "\n";
  }
  return os.str();
}

std::string outer_to_csv(const OuterSweep& sweep, bool stable_timing) {
  std::ostringstream os;
  os << "M,theta,value,proxy,status,n_vars,n_rows,solve_ms\n";
  for (size_t i = 0; i < sweep.points.size(); ++i) {
    const auto& pt = sweep.points[i];
    os << pt.m << ",";
    for (int t = 0; t < pt.theta.size(); ++t) {
      os << (t ? ";" : "") << format_double(pt.theta[t]);
    }
    os << "," << format_double(pt.value) << "," << format_double(sweep.proxy[i])
       << "," << pt.status << "," << pt.n_vars << "," << pt.n_rows << ","
       << (stable_timing ? 0 : static_cast<long long>(std::llround(pt.solve_ms)))
       << "\n";
  }
  os << "# M_star=" << sweep.m_star << "\n";
  return os.str();
}

std::string result_to_json(const CurvePoint& point) {
  json j;
  j["M"] = point.m;
  j["value"] = point.value;
  j["status"] = point.status;
  j["n_vars"] = point.n_vars;
  j["n_rows"] = point.n_rows;
  j["solve_ms"] = point.solve_ms;
  return j.dump();
}

}  // namespace swdro
