#pragma once

#include <Eigen/Dense>

namespace swdro {

/// Desk-scale polytope conversions used by the loss module (m <= ~16 rows,
/// dimension <= ~8).  Both directions enumerate supports by brute force.

/// Vertices of {x : W x <= g}, one per row, deduplicated.  Throws
/// UnboundedPolytope when a recession direction exists and InvalidArgument
/// when the polytope is empty.
Eigen::MatrixXd enumerate_vertices(const Eigen::MatrixXd& W,
                                   const Eigen::VectorXd& g);

/// Facet description (W, g) of conv(rows of V) with W x <= g.  Supports
/// full-dimensional polytopes; lower-dimensional hulls get paired opposing
/// rows for the affine hull.
struct HalfspaceRep {
  Eigen::MatrixXd W;
  Eigen::VectorXd g;
};

HalfspaceRep enumerate_facets(const Eigen::MatrixXd& vertices);

/// True when {x : W x <= 0} = {0}, i.e. {x : W x <= g} is bounded whenever
/// nonempty.
bool recession_cone_trivial(const Eigen::MatrixXd& W);

}  // namespace swdro
