#include <benchmark/benchmark.h>

#include <random>

#include "swdro/distribution.hpp"
#include "swdro/program.hpp"

namespace {

using namespace swdro;

DiscreteDistribution two_point_nominal() {
  Eigen::MatrixXd atoms(2, 1);
  atoms << -1, 1;
  Eigen::VectorXd w(2);
  w << 0.25, 0.75;
  return make_distribution(atoms, w);
}

UQInstance reference_instance() {
  Eigen::MatrixXd h(2, 3);
  h << 2, 5, 0, -5, 2, 0;
  return UQInstance{two_point_nominal(), 0.2, TransportCost{NormKind::L2, 1},
                    PolyhedralLoss::from_vertices(1, 2, h), 2};
}

void BM_TransportLP(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(7);
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  Eigen::MatrixXd costs(n, n);
  Eigen::VectorXd s(n), d(n);
  for (int i = 0; i < n; ++i) {
    s[i] = 0.2 + uniform();
    d[i] = 0.2 + uniform();
    for (int j = 0; j < n; ++j) costs(i, j) = uniform();
  }
  s /= s.sum();
  d /= d.sum();
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_transport(costs, s, d).value);
  }
}
BENCHMARK(BM_TransportLP)->Arg(8)->Arg(16)->Arg(32);

void BM_RelaxationBuild(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  UQInstance inst = reference_instance();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_relaxation(inst, m).program.n_vars);
  }
}
BENCHMARK(BM_RelaxationBuild)->Arg(4)->Arg(8)->Arg(12);

void BM_RelaxationSolve(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  UQInstance inst = reference_instance();
  BuiltProgram built = build_relaxation(inst, m);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_program(built).value);
  }
}
BENCHMARK(BM_RelaxationSolve)->Arg(4)->Arg(6)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
