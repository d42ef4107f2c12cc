#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "swdro/conic.hpp"
#include "swdro/errors.hpp"

namespace swdro {

/// Finitely supported probability measure on R^d.  Immutable once built:
/// construction normalizes weights (inputs within 1e-9 of unit mass are
/// rescaled exactly, anything further off is rejected) and merges atoms that
/// coincide componentwise within 1e-12.
class DiscreteDistribution {
 public:
  /// atoms: n x d row-major (one atom per row), weights: n nonnegative reals.
  DiscreteDistribution(Eigen::MatrixXd atoms, Eigen::VectorXd weights);

  int size() const { return static_cast<int>(atoms_.rows()); }
  int dimension() const { return static_cast<int>(atoms_.cols()); }
  const Eigen::MatrixXd& atoms() const { return atoms_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  Eigen::VectorXd atom(int i) const { return atoms_.row(i).transpose(); }

  static DiscreteDistribution dirac(const Eigen::VectorXd& point);

 private:
  Eigen::MatrixXd atoms_;
  Eigen::VectorXd weights_;
};

DiscreteDistribution make_distribution(const Eigen::MatrixXd& atoms,
                                       const Eigen::VectorXd& weights);

/// Ground transportation cost c(x, y) = ||x - y|| for one of the three norms.
/// The M-lift c^M is the coordinate-block sum of per-block costs.
struct TransportCost {
  NormKind norm = NormKind::L2;
  int dimension = 1;

  double operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  double lifted(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
};

/// Joint mass matrix over atoms of P (rows) and atoms of Q (columns).
struct Coupling {
  Eigen::MatrixXd mass;

  Eigen::VectorXd row_marginal() const { return mass.rowwise().sum(); }
  Eigen::VectorXd col_marginal() const { return mass.colwise().sum().transpose(); }
};

/// M-fold product power P^{(x) M} on R^{d*M}.  `cap` bounds the atom count of
/// the result; exceeding it raises CapExceeded.
DiscreteDistribution product_power(const DiscreteDistribution& p, int m,
                                   std::int64_t cap = 1 << 20);

DiscreteDistribution mixture(
    const std::vector<std::pair<double, DiscreteDistribution>>& components);

struct WassersteinSolution {
  double value = 0.0;
  Coupling plan;
};

/// Exact discrete optimal transport between P and Q under the given norm
/// cost.  d = 1 uses the sorted monotone coupling; higher dimensions solve
/// the dense transport LP.
WassersteinSolution wasserstein_exact(const DiscreteDistribution& p,
                                      const DiscreteDistribution& q,
                                      const TransportCost& cost);

/// Same, but forcing the transport LP path regardless of dimension (the 1-D
/// monotone coupling and the LP cross-check each other in the tests).
WassersteinSolution wasserstein_lp(const DiscreteDistribution& p,
                                   const DiscreteDistribution& q,
                                   const TransportCost& cost);

/// (1/M) * W_{c^M}( sum_k nu_k P_k^{(x)M}, Phat^{(x)M} ).  Nondecreasing in M
/// and bounded above by sum_k nu_k W_c(P_k, Phat).
double normalized_mixture_product_distance(
    const std::vector<std::pair<double, DiscreteDistribution>>& nu,
    const DiscreteDistribution& nominal, int m, const TransportCost& cost,
    std::int64_t cap = 1 << 20);

}  // namespace swdro
