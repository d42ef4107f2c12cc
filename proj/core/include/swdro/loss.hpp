#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "swdro/errors.hpp"
#include "swdro/multi_index.hpp"

namespace swdro {

enum class LossRep { Vertices, Halfspaces };

/// Concave piecewise-affine loss l(x) = min_{h in H} h.[x;1] on (R^n)^N,
/// with the coefficient polytope H subset R^{nN+1} held either as a vertex
/// list (rows [a...;b]) or as halfspaces {h : W h <= g}.  H must be nonempty
/// and bounded, which keeps l finite everywhere.
class PolyhedralLoss {
 public:
  static PolyhedralLoss from_vertices(int block_dim, int arity,
                                      Eigen::MatrixXd vertices);
  static PolyhedralLoss from_halfspaces(int block_dim, int arity,
                                        Eigen::MatrixXd W, Eigen::VectorXd g);

  int block_dim() const { return block_dim_; }
  int arity() const { return arity_; }
  int input_dim() const { return block_dim_ * arity_; }
  LossRep rep() const { return rep_; }

  bool has_vertices() const { return vertices_.has_value(); }
  /// Vertex list of H; converts (and caches nothing) when only halfspaces are
  /// stored.
  const Eigen::MatrixXd& vertices() const;
  const Eigen::MatrixXd& halfspace_W() const;
  const Eigen::VectorXd& halfspace_g() const;

  PolyhedralLoss to_vertex_rep() const;
  PolyhedralLoss to_halfspace_rep() const;

  double eval(const Eigen::VectorXd& x) const;

 private:
  PolyhedralLoss() = default;

  int block_dim_ = 0;
  int arity_ = 0;
  LossRep rep_ = LossRep::Vertices;
  std::optional<Eigen::MatrixXd> vertices_;
  std::optional<Eigen::MatrixXd> W_;
  std::optional<Eigen::VectorXd> g_;
};

/// Symmetrized lift of `loss` to (R^n)^M:
/// ((M-N)!/M!) * sum over non-repeating N-tuples l of loss(x_l).
double eval_sym_lift(const PolyhedralLoss& loss, int m, const Eigen::VectorXd& x,
                     std::int64_t cap = 50'000'000);

/// Legendre-Fenchel conjugate of the max-form polyhedral function
/// f(x) = max_{h in H'} h.[x;1] with H' = conv(rows of f_vertices):
/// f*(z) = -max{ b : [z; b] in H' }, +infinity outside the projection of H'.
double conjugate_eval(const Eigen::MatrixXd& f_vertices, const Eigen::VectorXd& z);

/// Constraint-block description of the conjugate of the symmetrized lift for
/// one equivalence class: blocks {a_l, b_l} with [a_l; b_l] in -H, the
/// equality z = coefficient * sum_l E_l^T a_l, and coefficient * sum_l b_l
/// entering the sigma inequality.  Membership in -H is rendered from
/// whichever representation the loss holds.
struct ConjugateBlocks {
  int block_dim = 0;   // n
  int arity = 0;       // N
  int lift = 0;        // M
  double coefficient = 0.0;  // (M-N)!/M!
  TupleSet tuples;
  LossRep rep = LossRep::Vertices;
  Eigen::MatrixXd vertices;  // rows of H (vertex rep): [a_l;b_l] = -sum lambda_v v
  Eigen::MatrixXd W;         // halfspace rep: -W [a_l;b_l] <= g
  Eigen::VectorXd g;
};

ConjugateBlocks conjugate_membership_blocks(const PolyhedralLoss& loss, int m,
                                            std::int64_t cap = 50'000'000);

/// Loss family l(theta, x) = min_{h : W h <= G theta + g0} h.[x;1] over a box
/// of decisions theta.
class ParametricPolyhedralLoss {
 public:
  ParametricPolyhedralLoss(int block_dim, int arity, Eigen::MatrixXd W,
                           Eigen::MatrixXd G, Eigen::VectorXd g0,
                           Eigen::MatrixXd theta_box);

  int block_dim() const { return block_dim_; }
  int arity() const { return arity_; }
  int theta_dim() const { return static_cast<int>(theta_box_.rows()); }
  const Eigen::MatrixXd& W() const { return W_; }
  const Eigen::MatrixXd& G() const { return G_; }
  const Eigen::VectorXd& g0() const { return g0_; }
  /// p x 2 matrix of (lo, hi) per coordinate.
  const Eigen::MatrixXd& theta_box() const { return theta_box_; }

  Eigen::VectorXd g_at(const Eigen::VectorXd& theta) const;
  PolyhedralLoss at(const Eigen::VectorXd& theta) const;

 private:
  int block_dim_ = 0;
  int arity_ = 0;
  Eigen::MatrixXd W_, G_;
  Eigen::VectorXd g0_;
  Eigen::MatrixXd theta_box_;
};

/// Closed-form quadratic losses from the worked examples; evaluation only,
/// never assembled into programs.
enum class QuadraticExampleKind {
  HalfSquaredDifference,  // (x1 - x2)^2 / 2
  NegProduct,             // -x1 x2
  ShiftedNegQuadratic,    // -2 x1^2 - 2 x1 x2
  ProductOfSquare,        // x1 x2^2
};

struct QuadraticExampleLoss {
  QuadraticExampleKind kind = QuadraticExampleKind::NegProduct;

  double operator()(const Eigen::VectorXd& x) const;
};

}  // namespace swdro
