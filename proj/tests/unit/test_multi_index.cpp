#include <doctest.h>

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "swdro/multi_index.hpp"

using namespace swdro;

TEST_CASE("tuple enumeration order and counts") {
  TupleSet t32 = enumerate_tuples(3, 2);
  REQUIRE(t32.tuples.size() == 6);
  const std::vector<std::vector<int>> expect = {{0, 1}, {0, 2}, {1, 0},
                                                {1, 2}, {2, 0}, {2, 1}};
  CHECK(t32.tuples == expect);

  TupleSet t22 = enumerate_tuples(2, 2);
  CHECK(t22.tuples == std::vector<std::vector<int>>{{0, 1}, {1, 0}});

  CHECK_THROWS_AS(enumerate_tuples(2, 3), Error);
  CHECK_THROWS_AS(enumerate_tuples(20, 10, 100), Error);

  CHECK(falling_factorial(8, 3) == 8 * 7 * 6);
}

TEST_CASE("class enumeration: sizes, weights, counts") {
  Eigen::VectorXd w(2);
  w << 0.25, 0.75;
  std::vector<MultiIndexClass> classes = enumerate_classes(2, 3, w);
  REQUIRE(classes.size() == 4);
  CHECK(classes[0].size == 1);
  CHECK(classes[1].size == 3);
  CHECK(classes[2].size == 3);
  CHECK(classes[3].size == 1);

  // class of (1,1,2) in one-based labels = rep {0,0,1}
  CHECK(classes[1].representative == std::vector<int>{0, 0, 1});
  CHECK(classes[1].weight == doctest::Approx(0.140625).epsilon(1e-15));

  Eigen::VectorXd one(1);
  one << 1.0;
  std::vector<MultiIndexClass> single = enumerate_classes(1, 5, one);
  REQUIRE(single.size() == 1);
  CHECK(single[0].weight == doctest::Approx(1.0));
}

TEST_CASE("weights sum to one, sizes sum to n^M") {
  testutil::Rng rng(5);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = rng.uniform_int(1, 4);
    const int m = rng.uniform_int(1, 8);
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w[i] = rng.uniform(0.05, 1.0);
    w /= w.sum();
    std::vector<MultiIndexClass> classes = enumerate_classes(n, m, w);
    CHECK(static_cast<std::int64_t>(classes.size()) == multiset_count(n, m));

    double weight_sum = 0.0;
    std::int64_t size_sum = 0;
    for (const auto& c : classes) {
      weight_sum += c.weight;
      size_sum += c.size;
    }
    CHECK(weight_sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(size_sum == static_cast<std::int64_t>(std::llround(std::pow(n, m))));
  }
}

TEST_CASE("class count matches direct enumeration for small M") {
  for (int n = 1; n <= 3; ++n) {
    for (int m = 1; m <= 6; ++m) {
      Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / n);
      std::vector<MultiIndexClass> classes = enumerate_classes(n, m, w);
      // direct enumeration of n^m tuples into sorted multisets
      std::set<std::vector<int>> reps;
      std::vector<int> idx(m, 0);
      while (true) {
        std::vector<int> sorted = idx;
        std::sort(sorted.begin(), sorted.end());
        reps.insert(sorted);
        int k = m - 1;
        while (k >= 0 && idx[k] == n - 1) idx[k--] = 0;
        if (k < 0) break;
        ++idx[k];
      }
      CHECK(classes.size() == reps.size());
    }
  }
}

TEST_CASE("canonical selector sorts the representative") {
  MultiIndexClass cls;
  cls.representative = {0, 0, 1};
  CHECK(canonical_selector(cls) == std::vector<int>{0, 0, 1});
  cls.representative = {1, 1, 1};
  CHECK(canonical_selector(cls) == std::vector<int>{1, 1, 1});
  cls.representative = {1, 0, 0};  // unsorted member of the class of (0,0,1)
  CHECK(canonical_selector(cls) == std::vector<int>{0, 0, 1});
}

TEST_CASE("scatter placements and adjointness") {
  Eigen::VectorXd a(2);
  a << 3.0, 4.0;  // blocks u, v with n = 1

  auto dense = [](const std::vector<std::pair<int, double>>& entries, int dim) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    for (const auto& [i, x] : entries) v[i] += x;
    return v;
  };

  CHECK(dense(scatter({1, 0}, a, 1, 2), 2) == Eigen::Vector2d(4.0, 3.0));
  Eigen::VectorXd expect(3);
  expect << 3.0, 0.0, 4.0;
  CHECK(dense(scatter({0, 2}, a, 1, 3), 3) == expect);
  expect << 3.0, 4.0, 0.0;
  CHECK(dense(scatter({0, 1}, a, 1, 3), 3) == expect);

  testutil::Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.uniform_int(1, 3);
    const int big_m = rng.uniform_int(2, 5);
    const int small_n = rng.uniform_int(1, big_m);
    TupleSet tuples = enumerate_tuples(big_m, small_n);
    const auto& tuple =
        tuples.tuples[static_cast<size_t>(rng.uniform_int(0, static_cast<int>(tuples.tuples.size()) - 1))];
    Eigen::VectorXd av(n * small_n), x(n * big_m);
    for (int i = 0; i < av.size(); ++i) av[i] = rng.uniform(-1, 1);
    for (int i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1, 1);

    const auto entries = scatter(tuple, av, n, big_m);
    double lhs = 0.0;
    for (const auto& [i, v] : entries) lhs += v * x[i];
    double rhs = 0.0;
    for (int k = 0; k < small_n; ++k) {
      for (int c = 0; c < n; ++c) rhs += av[k * n + c] * x[tuple[k] * n + c];
    }
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}
