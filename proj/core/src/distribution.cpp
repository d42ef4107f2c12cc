#include "swdro/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace swdro {

namespace {

constexpr double kMassTol = 1e-9;
constexpr double kAtomTol = 1e-12;

}  // namespace

DiscreteDistribution::DiscreteDistribution(Eigen::MatrixXd atoms,
                                           Eigen::VectorXd weights) {
  require(atoms.rows() == weights.size(), ErrorKind::DimensionMismatch,
          "atom and weight counts differ");
  require(atoms.rows() >= 1, ErrorKind::ZeroTotalMass, "no atoms given");
  for (int i = 0; i < weights.size(); ++i) {
    require(weights[i] >= 0.0, ErrorKind::NegativeWeight,
            "weight " + std::to_string(i) + " is negative");
  }
  const double total = weights.sum();
  require(total > 0.0, ErrorKind::ZeroTotalMass, "weights sum to zero");
  require(std::abs(total - 1.0) <= kMassTol, ErrorKind::NotAProbabilityVector,
          "weights sum to " + std::to_string(total) +
              ", beyond the 1e-9 normalization tolerance");
  weights /= total;

  // merge duplicate atoms (componentwise within 1e-12), preserving first-seen
  // order
  const int n = static_cast<int>(atoms.rows());
  std::vector<int> keep;
  std::vector<double> mass;
  for (int i = 0; i < n; ++i) {
    int found = -1;
    for (size_t k = 0; k < keep.size(); ++k) {
      if ((atoms.row(i) - atoms.row(keep[k])).cwiseAbs().maxCoeff() <= kAtomTol) {
        found = static_cast<int>(k);
        break;
      }
    }
    if (found >= 0) {
      mass[found] += weights[i];
    } else {
      keep.push_back(i);
      mass.push_back(weights[i]);
    }
  }
  atoms_.resize(static_cast<int>(keep.size()), atoms.cols());
  weights_.resize(static_cast<int>(keep.size()));
  for (size_t k = 0; k < keep.size(); ++k) {
    atoms_.row(static_cast<int>(k)) = atoms.row(keep[k]);
    weights_[static_cast<int>(k)] = mass[k];
  }
}

DiscreteDistribution DiscreteDistribution::dirac(const Eigen::VectorXd& point) {
  Eigen::MatrixXd atoms(1, point.size());
  atoms.row(0) = point.transpose();
  return DiscreteDistribution(atoms, Eigen::VectorXd::Ones(1));
}

DiscreteDistribution make_distribution(const Eigen::MatrixXd& atoms,
                                       const Eigen::VectorXd& weights) {
  return DiscreteDistribution(atoms, weights);
}

double TransportCost::operator()(const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y) const {
  require(x.size() == y.size(), ErrorKind::DimensionMismatch,
          "cost arguments differ in dimension");
  return norm_of(norm, x - y);
}

double TransportCost::lifted(const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y) const {
  require(x.size() == y.size(), ErrorKind::DimensionMismatch,
          "cost arguments differ in dimension");
  require(x.size() % dimension == 0, ErrorKind::DimensionMismatch,
          "lifted cost needs a whole number of blocks");
  double total = 0.0;
  for (int off = 0; off < x.size(); off += dimension) {
    total += norm_of(norm, x.segment(off, dimension) - y.segment(off, dimension));
  }
  return total;
}

DiscreteDistribution product_power(const DiscreteDistribution& p, int m,
                                   std::int64_t cap) {
  require(m >= 1, ErrorKind::InvalidArgument, "power must be positive");
  const int n = p.size();
  double count = std::pow(static_cast<double>(n), m);
  require(count <= static_cast<double>(cap), ErrorKind::CapExceeded,
          "product power would hold " + std::to_string(count) + " atoms");
  const auto total = static_cast<std::int64_t>(std::llround(count));
  const int d = p.dimension();

  Eigen::MatrixXd atoms(total, d * m);
  Eigen::VectorXd weights(total);
  std::vector<int> index(m, 0);
  for (std::int64_t row = 0; row < total; ++row) {
    double w = 1.0;
    for (int k = 0; k < m; ++k) {
      atoms.block(row, k * d, 1, d) = p.atoms().row(index[k]);
      w *= p.weights()[index[k]];
    }
    weights[row] = w;
    for (int k = m - 1; k >= 0; --k) {
      if (++index[k] < n) break;
      index[k] = 0;
    }
  }
  return DiscreteDistribution(std::move(atoms), std::move(weights));
}

DiscreteDistribution mixture(
    const std::vector<std::pair<double, DiscreteDistribution>>& components) {
  require(!components.empty(), ErrorKind::InvalidArgument,
          "mixture needs at least one component");
  double total = 0.0;
  for (const auto& [w, dist] : components) {
    require(w >= 0.0, ErrorKind::NotAProbabilityVector,
            "mixture weight is negative");
    require(dist.dimension() == components.front().second.dimension(),
            ErrorKind::DimensionMismatch, "mixture components differ in dimension");
    total += w;
  }
  require(std::abs(total - 1.0) <= kMassTol, ErrorKind::NotAProbabilityVector,
          "mixture weights sum to " + std::to_string(total));

  int rows = 0;
  for (const auto& [w, dist] : components) rows += dist.size();
  const int d = components.front().second.dimension();
  Eigen::MatrixXd atoms(rows, d);
  Eigen::VectorXd weights(rows);
  int at = 0;
  for (const auto& [w, dist] : components) {
    for (int i = 0; i < dist.size(); ++i) {
      atoms.row(at) = dist.atoms().row(i);
      weights[at] = w * dist.weights()[i] / total;
      ++at;
    }
  }
  return DiscreteDistribution(std::move(atoms), std::move(weights));
}

namespace {

// Monotone coupling of two sorted 1-D distributions; optimal for every cost
// that is convex in |x - y|, which covers all three norms at d = 1.
WassersteinSolution monotone_coupling_1d(const DiscreteDistribution& p,
                                         const DiscreteDistribution& q) {
  const int n = p.size(), m = q.size();
  std::vector<int> pi(n), qi(m);
  std::iota(pi.begin(), pi.end(), 0);
  std::iota(qi.begin(), qi.end(), 0);
  std::sort(pi.begin(), pi.end(),
            [&](int a, int b) { return p.atoms()(a, 0) < p.atoms()(b, 0); });
  std::sort(qi.begin(), qi.end(),
            [&](int a, int b) { return q.atoms()(a, 0) < q.atoms()(b, 0); });

  WassersteinSolution out;
  out.plan.mass = Eigen::MatrixXd::Zero(n, m);
  double value = 0.0;
  int i = 0, j = 0;
  double pi_mass = p.weights()[pi[0]], qj_mass = q.weights()[qi[0]];
  while (i < n && j < m) {
    const double moved = std::min(pi_mass, qj_mass);
    value += moved * std::abs(p.atoms()(pi[i], 0) - q.atoms()(qi[j], 0));
    out.plan.mass(pi[i], qi[j]) += moved;
    pi_mass -= moved;
    qj_mass -= moved;
    if (pi_mass <= 1e-15) {
      if (++i < n) pi_mass = p.weights()[pi[i]];
    }
    if (qj_mass <= 1e-15) {
      if (++j < m) qj_mass = q.weights()[qi[j]];
    }
  }
  out.value = value;
  return out;
}

Eigen::MatrixXd cost_matrix(const DiscreteDistribution& p,
                            const DiscreteDistribution& q,
                            const TransportCost& cost) {
  Eigen::MatrixXd c(p.size(), q.size());
  for (int i = 0; i < p.size(); ++i) {
    for (int j = 0; j < q.size(); ++j) {
      c(i, j) = cost.lifted(p.atom(i), q.atom(j));
    }
  }
  return c;
}

}  // namespace

WassersteinSolution wasserstein_lp(const DiscreteDistribution& p,
                                   const DiscreteDistribution& q,
                                   const TransportCost& cost) {
  require(p.dimension() == q.dimension(), ErrorKind::DimensionMismatch,
          "distributions live in different dimensions");
  TransportSolution t = solve_transport(cost_matrix(p, q, cost), p.weights(),
                                        q.weights());
  WassersteinSolution out;
  out.value = t.value;
  out.plan.mass = std::move(t.plan);
  return out;
}

WassersteinSolution wasserstein_exact(const DiscreteDistribution& p,
                                      const DiscreteDistribution& q,
                                      const TransportCost& cost) {
  require(p.dimension() == q.dimension(), ErrorKind::DimensionMismatch,
          "distributions live in different dimensions");
  if (p.dimension() == 1) return monotone_coupling_1d(p, q);
  return wasserstein_lp(p, q, cost);
}

double normalized_mixture_product_distance(
    const std::vector<std::pair<double, DiscreteDistribution>>& nu,
    const DiscreteDistribution& nominal, int m, const TransportCost& cost,
    std::int64_t cap) {
  require(m >= 1, ErrorKind::InvalidArgument, "M must be positive");
  std::vector<std::pair<double, DiscreteDistribution>> powered;
  powered.reserve(nu.size());
  for (const auto& [w, dist] : nu) {
    powered.emplace_back(w, product_power(dist, m, cap));
  }
  DiscreteDistribution mixed = mixture(powered);
  DiscreteDistribution nominal_m = product_power(nominal, m, cap);
  TransportCost block_cost{cost.norm, nominal.dimension()};
  return wasserstein_exact(mixed, nominal_m, block_cost).value / m;
}

}  // namespace swdro
