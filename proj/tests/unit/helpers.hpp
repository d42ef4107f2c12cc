#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>

#include "swdro/distribution.hpp"
#include "swdro/loss.hpp"
#include "swdro/program.hpp"

namespace testutil {

inline std::string data_path(const std::string& name) {
  return std::string(SWDRO_DATA_DIR) + "/" + name;
}

inline std::string golden_path(const std::string& name) {
  return std::string(SWDRO_GOLDEN_DIR) + "/" + name;
}

struct Rng {
  std::mt19937_64 engine;

  explicit Rng(std::uint64_t seed) : engine(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }
  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(engine() % static_cast<std::uint64_t>(hi - lo + 1));
  }
};

inline swdro::DiscreteDistribution random_distribution(Rng& rng, int d,
                                                       int max_atoms) {
  const int n = rng.uniform_int(1, max_atoms);
  Eigen::MatrixXd atoms(n, d);
  Eigen::VectorXd weights(n);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c) atoms(i, c) = rng.uniform(-2.0, 2.0);
    weights[i] = rng.uniform(0.05, 1.0);
  }
  weights /= weights.sum();
  return swdro::make_distribution(atoms, weights);
}

// concave polyhedral loss in vertex representation
inline swdro::PolyhedralLoss random_vertex_loss(Rng& rng, int block_dim,
                                                int arity, int max_vertices = 4,
                                                bool symmetric = false) {
  const int k = rng.uniform_int(2, max_vertices);
  const int cols = block_dim * arity + 1;
  Eigen::MatrixXd h(symmetric ? 2 * k : k, cols);
  for (int v = 0; v < k; ++v) {
    for (int c = 0; c < cols - 1; ++c) h(v, c) = rng.uniform(-3.0, 3.0);
    h(v, cols - 1) = rng.uniform(-1.0, 1.0);
  }
  if (symmetric) {
    // close the vertex set under the block swap so the loss is exchangeable
    for (int v = 0; v < k; ++v) {
      for (int b = 0; b < arity; ++b) {
        const int src = ((b + 1) % arity) * block_dim;
        h.block(k + v, b * block_dim, 1, block_dim) =
            h.block(v, src, 1, block_dim);
      }
      h(k + v, cols - 1) = h(v, cols - 1);
    }
  }
  return swdro::PolyhedralLoss::from_vertices(block_dim, arity, h);
}

inline swdro::UQInstance random_instance(Rng& rng, int d = 1, int arity = 2,
                                         int max_atoms = 2,
                                         bool symmetric = false) {
  swdro::UQInstance inst{
      random_distribution(rng, d, max_atoms),
      rng.uniform(0.05, 0.5),
      swdro::TransportCost{swdro::NormKind::L2, d},
      random_vertex_loss(rng, d, arity, 4, symmetric),
      arity};
  return inst;
}

inline swdro::UQInstance two_point_instance() {
  Eigen::MatrixXd atoms(2, 1);
  atoms << -1.0, 1.0;
  Eigen::VectorXd weights(2);
  weights << 0.25, 0.75;
  Eigen::MatrixXd h(2, 3);
  h << 2, 5, 0, -5, 2, 0;
  return swdro::UQInstance{
      swdro::make_distribution(atoms, weights), 0.2,
      swdro::TransportCost{swdro::NormKind::L2, 1},
      swdro::PolyhedralLoss::from_vertices(1, 2, h), 2};
}

inline swdro::ParametricPolyhedralLoss decision_box_loss() {
  Eigen::MatrixXd w(4, 3);
  w << 1, 1, -1, -1, 0, 0, 1.5, -0.5, -0.5, 0, 0, 1;
  Eigen::MatrixXd g(4, 1);
  g << -1, 1, -1, 1;
  Eigen::VectorXd g0(4);
  g0 << 1, 0, 0.5, 0;
  Eigen::MatrixXd box(1, 2);
  box << -3, 3;
  return swdro::ParametricPolyhedralLoss(1, 2, w, g, g0, box);
}

}  // namespace testutil
