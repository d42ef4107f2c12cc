#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "swdro/errors.hpp"

namespace swdro {

/// Non-repeating N-tuples from {0..M-1} in lexicographic order.
/// Indices are zero-based throughout; |tuples| = M!/(M-N)!.
struct TupleSet {
  int m = 0;
  int n = 0;
  std::vector<std::vector<int>> tuples;
};

std::int64_t falling_factorial(int m, int n);
std::int64_t multiset_count(int n_atoms, int m);  // C(m + n_atoms - 1, m)

TupleSet enumerate_tuples(int m, int n, std::int64_t cap = 50'000'000);

/// Equivalence class of atom multi-indices in {0..n_atoms-1}^M under
/// permutation.  `representative` is sorted nondecreasing; `size` is the
/// multinomial count of members; `weight` = size * prod_k p[rep_k].
struct MultiIndexClass {
  std::vector<int> representative;
  std::int64_t size = 0;
  double weight = 0.0;
};

/// One class per multiset, lexicographic by representative; class sizes sum
/// to n_atoms^M and weights sum to 1.  Counting is exact integer arithmetic
/// (128-bit) before the float conversion.
std::vector<MultiIndexClass> enumerate_classes(int n_atoms, int m,
                                               const Eigen::VectorXd& weights,
                                               std::int64_t cap = 50'000'000);

/// Sorted-nondecreasing member of the class: the deterministic selector.
std::vector<int> canonical_selector(const MultiIndexClass& cls);

/// Adjoint action of the component-selection map E_l: block a_k of `a`
/// (blocks of size `block_dim`) is added at block position l[k] of a vector
/// with m_blocks blocks.  Returned as (position, value) pairs so E_l is never
/// materialized.
std::vector<std::pair<int, double>> scatter(const std::vector<int>& tuple,
                                            const Eigen::VectorXd& a,
                                            int block_dim, int m_blocks);

}  // namespace swdro
