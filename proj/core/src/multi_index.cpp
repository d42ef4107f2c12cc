#include "swdro/multi_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace swdro {

std::int64_t falling_factorial(int m, int n) {
  // m!/(m-n)! with overflow guard; the caller's cap is far below the guard.
  std::int64_t r = 1;
  for (int k = 0; k < n; ++k) {
    require(r <= (std::int64_t{1} << 62) / std::max(1, m),
            ErrorKind::CapExceeded, "tuple count overflows");
    r *= (m - k);
  }
  return r;
}

std::int64_t multiset_count(int n_atoms, int m) {
  // C(m + n_atoms - 1, m) via the multiplicative formula
  __int128 num = 1;
  for (int k = 1; k <= m; ++k) {
    num = num * (n_atoms - 1 + k) / k;  // exact: prefix products of binomials
    require(num < (__int128{1} << 62), ErrorKind::CapExceeded,
            "class count overflows");
  }
  return static_cast<std::int64_t>(num);
}

TupleSet enumerate_tuples(int m, int n, std::int64_t cap) {
  require(n >= 1 && n <= m, ErrorKind::InvalidArgument,
          "need 1 <= N <= M, got N=" + std::to_string(n) +
              " M=" + std::to_string(m));
  const std::int64_t count = falling_factorial(m, n);
  require(count <= cap, ErrorKind::CapExceeded,
          "tuple set holds " + std::to_string(count) + " tuples, cap " +
              std::to_string(cap));
  TupleSet out;
  out.m = m;
  out.n = n;
  out.tuples.reserve(static_cast<size_t>(count));
  std::vector<int> current(n, -1);
  std::vector<bool> used(m, false);
  // depth-first lexicographic enumeration
  int depth = 0;
  int next = 0;
  while (depth >= 0) {
    if (current[depth] >= 0) used[current[depth]] = false;
    int candidate = next;
    while (candidate < m && used[candidate]) ++candidate;
    if (candidate >= m) {
      current[depth] = -1;
      --depth;
      if (depth >= 0) next = current[depth] + 1;
      continue;
    }
    current[depth] = candidate;
    used[candidate] = true;
    if (depth == n - 1) {
      out.tuples.push_back(current);
      next = candidate + 1;
    } else {
      ++depth;
      next = 0;
    }
  }
  return out;
}

std::vector<MultiIndexClass> enumerate_classes(int n_atoms, int m,
                                               const Eigen::VectorXd& weights,
                                               std::int64_t cap) {
  require(n_atoms >= 1 && m >= 1, ErrorKind::InvalidArgument,
          "need at least one atom and M >= 1");
  require(weights.size() == n_atoms, ErrorKind::DimensionMismatch,
          "weight vector size mismatch");
  const std::int64_t count = multiset_count(n_atoms, m);
  require(count <= cap, ErrorKind::CapExceeded,
          "class count " + std::to_string(count) + " exceeds cap");

  // class size = M! / prod_a (multiplicity of a)!, computed exactly in 128 bit
  auto class_size = [&](const std::vector<int>& rep) {
    __int128 size = 1;
    int seen = 0;
    int run = 0;
    int prev = -1;
    for (int v : rep) {
      if (v == prev) {
        ++run;
      } else {
        prev = v;
        run = 1;
      }
      ++seen;
      size = size * seen / run;  // exact: running multinomial
    }
    return size;
  };

  std::vector<MultiIndexClass> out;
  out.reserve(static_cast<size_t>(count));
  std::vector<int> rep(m, 0);
  while (true) {
    MultiIndexClass cls;
    cls.representative = rep;
    const __int128 size = class_size(rep);
    require(size <= __int128{std::numeric_limits<std::int64_t>::max()},
            ErrorKind::CapExceeded, "class size exceeds 64-bit range");
    cls.size = static_cast<std::int64_t>(size);
    double w = static_cast<double>(size);
    for (int v : rep) w *= weights[v];
    cls.weight = w;
    out.push_back(std::move(cls));

    int k = m - 1;
    while (k >= 0 && rep[k] == n_atoms - 1) --k;
    if (k < 0) break;
    const int v = rep[k] + 1;
    for (int i = k; i < m; ++i) rep[i] = v;
  }
  return out;
}

std::vector<int> canonical_selector(const MultiIndexClass& cls) {
  std::vector<int> rep = cls.representative;
  std::sort(rep.begin(), rep.end());
  return rep;
}

std::vector<std::pair<int, double>> scatter(const std::vector<int>& tuple,
                                            const Eigen::VectorXd& a,
                                            int block_dim, int m_blocks) {
  const int n = static_cast<int>(tuple.size());
  require(a.size() == static_cast<Eigen::Index>(n) * block_dim,
          ErrorKind::DimensionMismatch, "scatter input has wrong block count");
  std::vector<std::pair<int, double>> out;
  out.reserve(a.size());
  for (int k = 0; k < n; ++k) {
    require(tuple[k] >= 0 && tuple[k] < m_blocks, ErrorKind::DimensionMismatch,
            "tuple entry out of range");
    for (int j = 0; j < block_dim; ++j) {
      out.emplace_back(tuple[k] * block_dim + j, a[k * block_dim + j]);
    }
  }
  return out;
}

}  // namespace swdro
