#include <benchmark/benchmark.h>

#include <cmath>

#include "radial/manifolds.hpp"

namespace {

const radial::Model& config_a() {
  static const radial::Model m([] {
    radial::ProblemSpec s;
    s.n = 3;
    s.p = 2.0;
    s.nonlinearity = radial::NonlinearitySpec::double_power(7.0, 9.0);
    s.weight = radial::WeightSpec::constant(1.0);
    return s;
  }());
  return m;
}

void BM_Shoot(benchmark::State& state) {
  const double d = state.range(0) / 1000.0;
  for (auto _ : state) {
    auto o = radial::shoot(config_a(), d);
    benchmark::DoNotOptimize(o.zeros);
  }
}
BENCHMARK(BM_Shoot)->Arg(1)->Arg(500)->Arg(950)->Unit(benchmark::kMillisecond);

void BM_FieldEval(benchmark::State& state) {
  double x = 0.3;
  for (auto _ : state) {
    auto f = radial::vector_field(config_a(), 1.0, x, -0.2);
    benchmark::DoNotOptimize(f);
    x += 1e-12;
  }
}
BENCHMARK(BM_FieldEval);

void BM_Sequence(benchmark::State& state) {
  radial::SequenceOptions o;
  o.k_max = static_cast<int>(state.range(0));
  o.mirror = false;
  o.jobs = 1;
  for (auto _ : state) {
    auto rep = radial::find_sequences(config_a(), o);
    benchmark::DoNotOptimize(rep.A.values.data());
  }
}
BENCHMARK(BM_Sequence)->Arg(0)->Arg(2)->Unit(benchmark::kSecond)->Iterations(1);

void BM_TraceStable(benchmark::State& state) {
  std::vector<double> grid;
  for (int i = 0; i < 100; ++i) grid.push_back(1e-3 * std::pow(1e7, i / 99.0));
  radial::ManifoldOptions opt;
  opt.jobs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto c = radial::trace_manifold(config_a(), radial::ManifoldKind::kStablePlus, 4.0, grid, opt);
    benchmark::DoNotOptimize(c.points.data());
  }
}
BENCHMARK(BM_TraceStable)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
