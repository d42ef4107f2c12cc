#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "swdro/distribution.hpp"

using namespace swdro;

namespace {

Eigen::MatrixXd col(std::initializer_list<double> xs) {
  Eigen::MatrixXd m(static_cast<int>(xs.size()), 1);
  int i = 0;
  for (double x : xs) m(i++, 0) = x;
  return m;
}

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("construction, normalization, deduplication") {
  DiscreteDistribution p = make_distribution(col({-1, 1}), vec({0.25, 0.75}));
  CHECK(p.size() == 2);
  CHECK(p.weights().sum() == doctest::Approx(1.0).epsilon(1e-15));

  DiscreteDistribution point = make_distribution(col({0}), vec({1}));
  CHECK(point.size() == 1);

  DiscreteDistribution merged = make_distribution(col({0, 0}), vec({0.5, 0.5}));
  CHECK(merged.size() == 1);
  CHECK(merged.weights()[0] == doctest::Approx(1.0));

  CHECK_THROWS_AS(make_distribution(col({0, 1}), vec({-0.5, 1.5})), Error);
  CHECK_THROWS_AS(make_distribution(col({0, 1}), vec({0, 0})), Error);
  CHECK_THROWS_AS(make_distribution(col({0, 1}), vec({1})), Error);
  CHECK_THROWS_AS(make_distribution(col({0, 1}), vec({0.4, 0.4})), Error);
}

TEST_CASE("product powers") {
  DiscreteDistribution fair = make_distribution(col({-1, 1}), vec({0.5, 0.5}));
  DiscreteDistribution sq = product_power(fair, 2);
  CHECK(sq.size() == 4);
  CHECK(sq.dimension() == 2);
  for (int i = 0; i < 4; ++i) CHECK(sq.weights()[i] == doctest::Approx(0.25));

  DiscreteDistribution skew = make_distribution(col({-1, 1}), vec({0.25, 0.75}));
  DiscreteDistribution sq2 = product_power(skew, 2);
  std::vector<double> expect = {0.0625, 0.1875, 0.1875, 0.5625};
  for (int i = 0; i < 4; ++i) {
    CHECK(sq2.weights()[i] == doctest::Approx(expect[i]).epsilon(1e-14));
  }

  DiscreteDistribution point = make_distribution(col({0}), vec({1}));
  DiscreteDistribution cube = product_power(point, 3);
  CHECK(cube.size() == 1);
  CHECK(cube.dimension() == 3);

  CHECK_THROWS_AS(product_power(fair, 30, 1000), Error);
}

TEST_CASE("mixtures") {
  DiscreteDistribution a = DiscreteDistribution::dirac(vec({0}));
  DiscreteDistribution b = DiscreteDistribution::dirac(vec({2}));
  DiscreteDistribution mix = mixture({{0.5, a}, {0.5, b}});
  CHECK(mix.size() == 2);
  CHECK(mix.weights()[0] == doctest::Approx(0.5));

  DiscreteDistribution mix2 =
      mixture({{0.5, product_power(a, 2)}, {0.5, product_power(b, 2)}});
  CHECK(mix2.size() == 2);
  CHECK(mix2.dimension() == 2);

  DiscreteDistribution same = mixture({{1.0, a}});
  CHECK(same.size() == a.size());

  CHECK_THROWS_AS(mixture({{0.7, a}, {0.7, b}}), Error);
  DiscreteDistribution c2 = DiscreteDistribution::dirac(vec({0, 0}));
  CHECK_THROWS_AS(mixture({{0.5, a}, {0.5, c2}}), Error);
}

TEST_CASE("exact transport on the paper pair") {
  DiscreteDistribution pstar =
      make_distribution(col({-0.9, 1.1}), vec({0.3, 0.7}));
  DiscreteDistribution phat = make_distribution(col({-1, 1}), vec({0.25, 0.75}));
  TransportCost cost{NormKind::L2, 1};
  WassersteinSolution sol = wasserstein_exact(pstar, phat, cost);
  CHECK(sol.value == doctest::Approx(0.19).epsilon(1e-12));
  CHECK((sol.plan.row_marginal() - pstar.weights()).cwiseAbs().maxCoeff() <=
        1e-8);
  CHECK((sol.plan.col_marginal() - phat.weights()).cwiseAbs().maxCoeff() <=
        1e-8);

  // identity of indiscernibles with a diagonal plan
  WassersteinSolution self = wasserstein_exact(phat, phat, cost);
  CHECK(self.value == 0.0);

  // forced coupling between two point masses in the lifted space
  DiscreteDistribution zero2 =
      product_power(DiscreteDistribution::dirac(vec({0})), 2);
  DiscreteDistribution ones = DiscreteDistribution::dirac(vec({1, 1}));
  WassersteinSolution forced = wasserstein_exact(zero2, ones, cost);
  CHECK(forced.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("self-distance vanishes exactly on both paths") {
  testutil::Rng rng(88);
  for (int trial = 0; trial < 5; ++trial) {
    const int d = rng.uniform_int(1, 2);
    DiscreteDistribution p = testutil::random_distribution(rng, d, 4);
    TransportCost cost{NormKind::L2, d};
    CHECK(wasserstein_exact(p, p, cost).value == 0.0);
    CHECK(wasserstein_lp(p, p, cost).value == 0.0);
  }
}

TEST_CASE("product identity over random pairs") {
  testutil::Rng rng(42);
  int done = 0;
  while (done < 50) {
    const int d = rng.uniform_int(1, 2);
    for (NormKind norm : {NormKind::L1, NormKind::L2, NormKind::Linf}) {
      DiscreteDistribution p = testutil::random_distribution(rng, d, 4);
      DiscreteDistribution q = testutil::random_distribution(rng, d, 4);
      const int m = rng.uniform_int(2, 3);
      TransportCost cost{norm, d};
      const double base = wasserstein_exact(p, q, cost).value;
      const double lifted =
          wasserstein_exact(product_power(p, m), product_power(q, m), cost).value;
      CHECK(std::abs(lifted - m * base) <= 1e-6);
    }
    done += 3;
  }
}

TEST_CASE("1-D fast path equals the LP for every norm kind") {
  testutil::Rng rng(7);
  for (int trial = 0; trial < 15; ++trial) {
    DiscreteDistribution p = testutil::random_distribution(rng, 1, 4);
    DiscreteDistribution q = testutil::random_distribution(rng, 1, 4);
    for (NormKind norm : {NormKind::L1, NormKind::L2, NormKind::Linf}) {
      TransportCost cost{norm, 1};
      const double fast = wasserstein_exact(p, q, cost).value;
      const double lp = wasserstein_lp(p, q, cost).value;
      CHECK(std::abs(fast - lp) <= 1e-9);
    }
  }
}

TEST_CASE("normalized mixture-product distance") {
  DiscreteDistribution d0 = DiscreteDistribution::dirac(vec({0}));
  DiscreteDistribution d2 = DiscreteDistribution::dirac(vec({2}));
  DiscreteDistribution d1 = DiscreteDistribution::dirac(vec({1}));
  TransportCost cost{NormKind::L2, 1};

  // point-mass second marginal forces the coupling at every M
  for (int m = 1; m <= 3; ++m) {
    CHECK(normalized_mixture_product_distance({{0.5, d0}, {0.5, d2}}, d1, m,
                                              cost) == doctest::Approx(1.0));
  }

  DiscreteDistribution dm1 = DiscreteDistribution::dirac(vec({-1}));
  DiscreteDistribution dp1 = DiscreteDistribution::dirac(vec({1}));
  DiscreteDistribution phat =
      make_distribution(col({-1, 1}), vec({0.5, 0.5}));
  CHECK(normalized_mixture_product_distance({{0.5, dm1}, {0.5, dp1}}, phat, 1,
                                            cost) == doctest::Approx(0.0));
  CHECK(normalized_mixture_product_distance({{0.5, dm1}, {0.5, dp1}}, phat, 2,
                                            cost) ==
        doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("mixture distance is nondecreasing in M and bounded by the mean") {
  testutil::Rng rng(99);
  for (int trial = 0; trial < 8; ++trial) {
    const int comps = rng.uniform_int(1, 3);
    std::vector<std::pair<double, DiscreteDistribution>> nu;
    Eigen::VectorXd w(comps);
    for (int k = 0; k < comps; ++k) w[k] = rng.uniform(0.1, 1.0);
    w /= w.sum();
    for (int k = 0; k < comps; ++k) {
      nu.emplace_back(w[k], testutil::random_distribution(rng, 1, 3));
    }
    DiscreteDistribution phat = testutil::random_distribution(rng, 1, 3);
    TransportCost cost{NormKind::L2, 1};

    double bound = 0.0;
    for (const auto& [wk, pk] : nu) {
      bound += wk * wasserstein_exact(pk, phat, cost).value;
    }
    double prev = -1.0;
    for (int m = 1; m <= 4; ++m) {
      const double val =
          normalized_mixture_product_distance(nu, phat, m, cost);
      CHECK(val >= prev - 1e-7);
      CHECK(val <= bound + 1e-7);
      prev = val;
    }
  }
}
