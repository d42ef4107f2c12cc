#include "swdro/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "swdro/conic.hpp"
#include "swdro/polytope.hpp"

namespace swdro {

PolyhedralLoss PolyhedralLoss::from_vertices(int block_dim, int arity,
                                             Eigen::MatrixXd vertices) {
  require(block_dim >= 1 && arity >= 1, ErrorKind::InvalidArgument,
          "loss needs positive block dimension and arity");
  require(vertices.rows() >= 1, ErrorKind::InvalidArgument,
          "vertex representation needs at least one row");
  require(vertices.cols() == block_dim * arity + 1, ErrorKind::DimensionMismatch,
          "vertex rows must have nN+1 entries");
  PolyhedralLoss loss;
  loss.block_dim_ = block_dim;
  loss.arity_ = arity;
  loss.rep_ = LossRep::Vertices;
  loss.vertices_ = std::move(vertices);
  return loss;
}

PolyhedralLoss PolyhedralLoss::from_halfspaces(int block_dim, int arity,
                                               Eigen::MatrixXd W,
                                               Eigen::VectorXd g) {
  require(block_dim >= 1 && arity >= 1, ErrorKind::InvalidArgument,
          "loss needs positive block dimension and arity");
  require(W.cols() == block_dim * arity + 1, ErrorKind::DimensionMismatch,
          "halfspace columns must be nN+1");
  require(W.rows() == g.size(), ErrorKind::DimensionMismatch,
          "halfspace row count mismatch");
  require(recession_cone_trivial(W), ErrorKind::UnboundedPolytope,
          "coefficient polytope H is unbounded");
  // nonemptiness probe by feasibility LP (cheaper than vertex enumeration)
  {
    ConicProgram p;
    for (int j = 0; j < W.cols(); ++j) p.add_var(0.0);
    for (int r = 0; r < W.rows(); ++r) {
      auto& row = p.add_ineq(g[r]);
      for (int j = 0; j < W.cols(); ++j) {
        if (W(r, j) != 0.0) row.add(j, W(r, j));
      }
    }
    require(solve(p).status == SolveStatus::Optimal, ErrorKind::InvalidArgument,
            "H is empty");
  }
  PolyhedralLoss loss;
  loss.block_dim_ = block_dim;
  loss.arity_ = arity;
  loss.rep_ = LossRep::Halfspaces;
  loss.W_ = std::move(W);
  loss.g_ = std::move(g);
  return loss;
}

const Eigen::MatrixXd& PolyhedralLoss::vertices() const {
  require(vertices_.has_value(), ErrorKind::InvalidArgument,
          "loss holds no vertex representation; convert first");
  return *vertices_;
}

const Eigen::MatrixXd& PolyhedralLoss::halfspace_W() const {
  require(W_.has_value(), ErrorKind::InvalidArgument,
          "loss holds no halfspace representation; convert first");
  return *W_;
}

const Eigen::VectorXd& PolyhedralLoss::halfspace_g() const {
  require(g_.has_value(), ErrorKind::InvalidArgument,
          "loss holds no halfspace representation; convert first");
  return *g_;
}

PolyhedralLoss PolyhedralLoss::to_vertex_rep() const {
  if (vertices_.has_value()) {
    return from_vertices(block_dim_, arity_, *vertices_);
  }
  return from_vertices(block_dim_, arity_, enumerate_vertices(*W_, *g_));
}

PolyhedralLoss PolyhedralLoss::to_halfspace_rep() const {
  if (W_.has_value()) return from_halfspaces(block_dim_, arity_, *W_, *g_);
  HalfspaceRep rep = enumerate_facets(*vertices_);
  return from_halfspaces(block_dim_, arity_, rep.W, rep.g);
}

double PolyhedralLoss::eval(const Eigen::VectorXd& x) const {
  require(x.size() == input_dim(), ErrorKind::DimensionMismatch,
          "loss input has dimension " + std::to_string(x.size()) +
              ", expected " + std::to_string(input_dim()));
  Eigen::VectorXd lift(x.size() + 1);
  lift.head(x.size()) = x;
  lift[x.size()] = 1.0;
  if (vertices_.has_value()) {
    return (*vertices_ * lift).minCoeff();
  }
  // min h.[x;1] over {W h <= g} by LP per call
  ConicProgram p;
  const int dim = static_cast<int>(lift.size());
  for (int i = 0; i < dim; ++i) p.add_var(lift[i]);
  for (int r = 0; r < W_->rows(); ++r) {
    auto& row = p.add_ineq((*g_)[r]);
    for (int j = 0; j < dim; ++j) {
      if ((*W_)(r, j) != 0.0) row.add(j, (*W_)(r, j));
    }
  }
  SolveResult res = solve(p);
  require(res.status == SolveStatus::Optimal, ErrorKind::SolverFailure,
          "loss evaluation LP did not reach optimality");
  return res.value;
}

double eval_sym_lift(const PolyhedralLoss& loss, int m, const Eigen::VectorXd& x,
                     std::int64_t cap) {
  const int n = loss.block_dim();
  const int arity = loss.arity();
  require(m >= arity, ErrorKind::InvalidArgument, "need M >= N");
  require(x.size() == static_cast<Eigen::Index>(n) * m,
          ErrorKind::DimensionMismatch, "lift input needs nM entries");
  TupleSet tuples = enumerate_tuples(m, arity, cap);
  const double coef =
      1.0 / static_cast<double>(falling_factorial(m, arity));
  double total = 0.0;
  Eigen::VectorXd xl(static_cast<Eigen::Index>(n) * arity);
  for (const auto& tuple : tuples.tuples) {
    for (int k = 0; k < arity; ++k) {
      xl.segment(static_cast<Eigen::Index>(k) * n, n) =
          x.segment(static_cast<Eigen::Index>(tuple[k]) * n, n);
    }
    total += loss.eval(xl);
  }
  return coef * total;
}

double conjugate_eval(const Eigen::MatrixXd& f_vertices,
                      const Eigen::VectorXd& z) {
  const int k = static_cast<int>(f_vertices.rows());
  const int d = static_cast<int>(f_vertices.cols()) - 1;
  require(z.size() == d, ErrorKind::DimensionMismatch,
          "conjugate argument dimension mismatch");
  // max b over [z; b] in conv(f_vertices): feasibility in the simplex weights
  ConicProgram p;
  for (int i = 0; i < k; ++i) {
    p.add_nonneg_var(-f_vertices(i, d));  // maximize sum lambda_i * b_i
  }
  auto& norm_row = p.add_eq(1.0);
  for (int i = 0; i < k; ++i) norm_row.add(i, 1.0);
  for (int j = 0; j < d; ++j) {
    auto& row = p.add_eq(z[j]);
    for (int i = 0; i < k; ++i) row.add(i, f_vertices(i, j));
  }
  SolveResult res = solve(p);
  if (res.status == SolveStatus::Infeasible) {
    return std::numeric_limits<double>::infinity();
  }
  require(res.status == SolveStatus::Optimal, ErrorKind::SolverFailure,
          "conjugate LP did not converge");
  return res.value;  // -max b
}

ConjugateBlocks conjugate_membership_blocks(const PolyhedralLoss& loss, int m,
                                            std::int64_t cap) {
  require(m >= loss.arity(), ErrorKind::InvalidArgument, "need M >= N");
  ConjugateBlocks blocks;
  blocks.block_dim = loss.block_dim();
  blocks.arity = loss.arity();
  blocks.lift = m;
  blocks.tuples = enumerate_tuples(m, loss.arity(), cap);
  blocks.coefficient =
      1.0 / static_cast<double>(falling_factorial(m, loss.arity()));
  blocks.rep = loss.rep();
  if (loss.rep() == LossRep::Vertices) {
    blocks.vertices = loss.vertices();
  } else {
    blocks.W = loss.halfspace_W();
    blocks.g = loss.halfspace_g();
  }
  return blocks;
}

ParametricPolyhedralLoss::ParametricPolyhedralLoss(int block_dim, int arity,
                                                   Eigen::MatrixXd W,
                                                   Eigen::MatrixXd G,
                                                   Eigen::VectorXd g0,
                                                   Eigen::MatrixXd theta_box)
    : block_dim_(block_dim),
      arity_(arity),
      W_(std::move(W)),
      G_(std::move(G)),
      g0_(std::move(g0)),
      theta_box_(std::move(theta_box)) {
  require(block_dim_ >= 1 && arity_ >= 1, ErrorKind::InvalidArgument,
          "loss needs positive block dimension and arity");
  require(W_.cols() == block_dim_ * arity_ + 1, ErrorKind::DimensionMismatch,
          "halfspace columns must be nN+1");
  require(W_.rows() == G_.rows() && W_.rows() == g0_.size(),
          ErrorKind::DimensionMismatch, "W, G, g0 row counts differ");
  require(theta_box_.cols() == 2 && theta_box_.rows() == G_.cols(),
          ErrorKind::DimensionMismatch,
          "theta box must give (lo, hi) per decision coordinate");
  for (int i = 0; i < theta_box_.rows(); ++i) {
    require(theta_box_(i, 0) <= theta_box_(i, 1), ErrorKind::EmptyTheta,
            "theta box coordinate " + std::to_string(i) + " is empty");
  }
  require(recession_cone_trivial(W_), ErrorKind::UnboundedPolytope,
          "H(theta) is unbounded for every theta (direction independent of g)");
  // H(theta) must be nonempty somewhere on the box: joint feasibility LP over
  // (h, theta).
  ConicProgram p;
  const int hd = static_cast<int>(W_.cols());
  const int pd = static_cast<int>(G_.cols());
  for (int i = 0; i < hd + pd; ++i) p.add_var(0.0);
  for (int r = 0; r < W_.rows(); ++r) {
    auto& row = p.add_ineq(g0_[r]);
    for (int j = 0; j < hd; ++j) {
      if (W_(r, j) != 0.0) row.add(j, W_(r, j));
    }
    for (int j = 0; j < pd; ++j) {
      if (G_(r, j) != 0.0) row.add(hd + j, -G_(r, j));
    }
  }
  for (int j = 0; j < pd; ++j) {
    auto& up = p.add_ineq(theta_box_(j, 1));
    up.add(hd + j, 1.0);
    auto& lo = p.add_ineq(-theta_box_(j, 0));
    lo.add(hd + j, -1.0);
  }
  SolveResult res = solve(p);
  require(res.status == SolveStatus::Optimal, ErrorKind::EmptyTheta,
          "H(theta) is empty for every theta in the box");
}

Eigen::VectorXd ParametricPolyhedralLoss::g_at(const Eigen::VectorXd& theta) const {
  require(theta.size() == theta_dim(), ErrorKind::DimensionMismatch,
          "theta dimension mismatch");
  return G_ * theta + g0_;
}

PolyhedralLoss ParametricPolyhedralLoss::at(const Eigen::VectorXd& theta) const {
  return PolyhedralLoss::from_halfspaces(block_dim_, arity_, W_, g_at(theta));
}

double QuadraticExampleLoss::operator()(const Eigen::VectorXd& x) const {
  require(x.size() == 2, ErrorKind::DimensionMismatch,
          "quadratic example losses take two scalar arguments");
  const double x1 = x[0], x2 = x[1];
  switch (kind) {
    case QuadraticExampleKind::HalfSquaredDifference:
      return 0.5 * (x1 - x2) * (x1 - x2);
    case QuadraticExampleKind::NegProduct:
      return -x1 * x2;
    case QuadraticExampleKind::ShiftedNegQuadratic:
      return -2.0 * x1 * x1 - 2.0 * x1 * x2;
    case QuadraticExampleKind::ProductOfSquare:
      return x1 * x2 * x2;
  }
  return 0.0;
}

}  // namespace swdro
