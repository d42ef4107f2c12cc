#include "swdro/polytope.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "swdro/conic.hpp"
#include "swdro/errors.hpp"

namespace swdro {

namespace {

constexpr double kFeasTol = 1e-8;
constexpr double kRankTol = 1e-9;

void next_subset(std::vector<int>& subset, int n, bool& done) {
  const int k = static_cast<int>(subset.size());
  int i = k - 1;
  while (i >= 0 && subset[i] == n - k + i) --i;
  if (i < 0) {
    done = true;
    return;
  }
  ++subset[i];
  for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
}

}  // namespace

bool recession_cone_trivial(const Eigen::MatrixXd& W) {
  const int d = static_cast<int>(W.cols());
  for (int i = 0; i < d; ++i) {
    for (double sign : {1.0, -1.0}) {
      ConicProgram p;
      for (int j = 0; j < d; ++j) p.add_var(0.0);
      p.objective[i] = -sign;  // maximize sign * d_i
      for (int r = 0; r < W.rows(); ++r) {
        auto& row = p.add_ineq(0.0);
        for (int j = 0; j < d; ++j) {
          if (W(r, j) != 0.0) row.add(j, W(r, j));
        }
      }
      for (int j = 0; j < d; ++j) {
        auto& up = p.add_ineq(1.0);
        up.add(j, 1.0);
        auto& lo = p.add_ineq(1.0);
        lo.add(j, -1.0);
      }
      SolveResult res = solve(p);
      if (res.status == SolveStatus::Optimal && -res.value > 1e-7) return false;
    }
  }
  return true;
}

Eigen::MatrixXd enumerate_vertices(const Eigen::MatrixXd& W,
                                   const Eigen::VectorXd& g) {
  const int m = static_cast<int>(W.rows());
  const int d = static_cast<int>(W.cols());
  require(g.size() == m, ErrorKind::DimensionMismatch,
          "halfspace offsets size mismatch");
  require(m >= 1 && d >= 1, ErrorKind::InvalidArgument, "degenerate polytope");
  require(recession_cone_trivial(W), ErrorKind::UnboundedPolytope,
          "halfspace polytope has a recession direction");
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());

  std::vector<Eigen::VectorXd> vertices;
  if (m < d) {
    fail(ErrorKind::UnboundedPolytope,
         "fewer halfspaces than dimensions cannot bound a polytope");
  }

  std::vector<int> subset(d);
  for (int i = 0; i < d; ++i) subset[i] = i;
  bool done = false;
  while (!done) {
    Eigen::MatrixXd Ws(d, d);
    Eigen::VectorXd gs(d);
    for (int i = 0; i < d; ++i) {
      Ws.row(i) = W.row(subset[i]);
      gs[i] = g[subset[i]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Ws);
    if (lu.rank() == d) {
      Eigen::VectorXd x = lu.solve(gs);
      if (((W * x - g).array() <= kFeasTol * scale).all()) {
        bool dup = false;
        for (const auto& v : vertices) {
          if ((v - x).cwiseAbs().maxCoeff() <= 1e-7 * scale) {
            dup = true;
            break;
          }
        }
        if (!dup) vertices.push_back(x);
      }
    }
    next_subset(subset, m, done);
  }
  require(!vertices.empty(), ErrorKind::InvalidArgument,
          "halfspace polytope is empty");

  Eigen::MatrixXd out(static_cast<int>(vertices.size()), d);
  for (size_t i = 0; i < vertices.size(); ++i) {
    out.row(static_cast<int>(i)) = vertices[i].transpose();
  }
  return out;
}

HalfspaceRep enumerate_facets(const Eigen::MatrixXd& vertices) {
  const int k = static_cast<int>(vertices.rows());
  const int d = static_cast<int>(vertices.cols());
  require(k >= 1 && d >= 1, ErrorKind::InvalidArgument, "no vertices");

  const Eigen::VectorXd centroid = vertices.colwise().mean().transpose();
  Eigen::MatrixXd centered = vertices.rowwise() - centroid.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      centered, Eigen::ComputeFullV | Eigen::ComputeThinU);
  const double smax = svd.singularValues().size()
                          ? svd.singularValues().maxCoeff()
                          : 0.0;
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()[i] > kRankTol * std::max(1.0, smax)) ++rank;
  }

  std::vector<Eigen::VectorXd> rows;
  std::vector<double> offsets;
  auto add_row = [&](const Eigen::VectorXd& n, double b) {
    const double nn = n.norm();
    if (nn < 1e-12) return;
    Eigen::VectorXd nu = n / nn;
    const double bu = b / nn;
    for (size_t i = 0; i < rows.size(); ++i) {
      if ((rows[i] - nu).cwiseAbs().maxCoeff() <= 1e-7 &&
          std::abs(offsets[i] - bu) <= 1e-7) {
        return;
      }
    }
    rows.push_back(nu);
    offsets.push_back(bu);
  };

  // affine-hull directions as paired opposing rows
  for (int i = rank; i < d; ++i) {
    Eigen::VectorXd u = svd.matrixV().col(i);
    add_row(u, u.dot(centroid));
    add_row(-u, -u.dot(centroid));
  }

  if (rank >= 1) {
    Eigen::MatrixXd basis = svd.matrixV().leftCols(rank);
    Eigen::MatrixXd y = centered * basis;  // k x rank
    if (rank == 1) {
      const double lo = y.col(0).minCoeff(), hi = y.col(0).maxCoeff();
      Eigen::VectorXd u = basis.col(0);
      add_row(u, hi + u.dot(centroid));
      add_row(-u, -lo - u.dot(centroid));
    } else {
      std::vector<int> subset(rank);
      for (int i = 0; i < rank; ++i) subset[i] = i;
      bool done = false;
      while (!done) {
        Eigen::MatrixXd diffs(rank - 1, rank);
        for (int i = 1; i < rank; ++i) {
          diffs.row(i - 1) = y.row(subset[i]) - y.row(subset[0]);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> dsvd(diffs, Eigen::ComputeFullV);
        int drank = 0;
        if (diffs.rows() > 0 && dsvd.singularValues().maxCoeff() > 0) {
          drank = static_cast<int>(
              (dsvd.singularValues().array() >
               kRankTol * std::max(1.0, dsvd.singularValues().maxCoeff()))
                  .count());
        }
        if (drank == rank - 1) {
          Eigen::VectorXd n = dsvd.matrixV().col(rank - 1);
          const double b0 = n.dot(y.row(subset[0]).transpose());
          const double hi = (y * n).maxCoeff();
          const double lo = (y * n).minCoeff();
          const double span = std::max(1.0, hi - lo);
          if (hi - b0 <= 1e-7 * span) {
            add_row(basis * n, b0 + n.dot(basis.transpose() * centroid));
          } else if (b0 - lo <= 1e-7 * span) {
            add_row(-(basis * n), -b0 - n.dot(basis.transpose() * centroid));
          }
        }
        next_subset(subset, k, done);
      }
    }
  }

  require(!rows.empty(), ErrorKind::InvalidArgument,
          "facet enumeration produced no rows");
  HalfspaceRep rep;
  rep.W.resize(static_cast<int>(rows.size()), d);
  rep.g.resize(static_cast<int>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    rep.W.row(static_cast<int>(i)) = rows[i].transpose();
    rep.g[static_cast<int>(i)] = offsets[i];
  }
  return rep;
}

}  // namespace swdro
