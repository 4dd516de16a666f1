#include <benchmark/benchmark.h>

#include <string>

#include "varicheck/theorems.hpp"
#include "varicheck/variation.hpp"

namespace {

using namespace varicheck;

const std::string kFixtures = VARICHECK_FIXTURES_DIR;

std::pair<ProblemSpec, PiecewisePath> fixture(const std::string& name) {
  return load_problem(kFixtures + "/" + name);
}

void BM_ParseIntegrand(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_expression("(v1 - v2^3)^2 + x1*v2^2", 2));
  }
}
BENCHMARK(BM_ParseIntegrand);

void BM_EvaluateIntegrand(benchmark::State& state) {
  ExprPtr e = parse_expression("(v1 - v2^3)^2 + x1*v2^2", 2);
  double x[2] = {0.3, -0.2};
  double v[2] = {1.1, 0.4};
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(e, {0.5, {x, 2}, {v, 2}}));
  }
}
BENCHMARK(BM_EvaluateIntegrand);

void BM_Excess(benchmark::State& state) {
  auto [spec, path] = fixture("ex5_4.toml");
  Vec eta{1.0, 1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(excess(spec, path, {0.5, Side::TwoSided}, eta));
  }
}
BENCHMARK(BM_Excess);

void BM_FunctionalValue(benchmark::State& state) {
  auto [spec, path] = fixture("ex5_3.toml");
  for (auto _ : state) {
    benchmark::DoNotOptimize(functional_value(spec, path, 1e-10));
  }
}
BENCHMARK(BM_FunctionalValue);

void BM_IntervalCheckStrong(benchmark::State& state) {
  auto [spec, path] = fixture("ex5_1.toml");
  IntervalQuery q{{2.0}, 0.5, 0.0, 1.0, 1e-9, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        check_interval(spec, path, q, "4.2", Mode::Strong, ScanConfig{}, 41));
  }
}
BENCHMARK(BM_IntervalCheckStrong);

void BM_WeakScan(benchmark::State& state) {
  auto [spec, path] = fixture("ex5_1.toml");
  IntervalQuery q{{2.0}, 0.5, 0.0, 1.0, 1e-9, 0.0};
  ScanConfig scan{1.0, static_cast<int>(state.range(0)),
                  static_cast<int>(state.range(0)), 1e-9, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        check_interval(spec, path, q, "4.2", Mode::Weak, scan, 11));
  }
}
BENCHMARK(BM_WeakScan)->Arg(7)->Arg(15);

void BM_Increment(benchmark::State& state) {
  auto [spec, path] = fixture("ex5_3.toml");
  VariationParams vp;
  vp.theta = 0.5;
  vp.lambda = 0.5;
  vp.xi = {1.0};
  vp.side = Side::Plus;
  vp.epsilon = 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(increment(spec, path, vp, 1e-12));
  }
}
BENCHMARK(BM_Increment);

void BM_FitExpansion(benchmark::State& state) {
  auto [spec, path] = fixture("ex5_3.toml");
  VariationParams vp;
  vp.theta = 0.5;
  vp.lambda = 0.5;
  vp.xi = {1.0};
  vp.side = Side::Plus;
  auto ladder = default_epsilon_ladder(0.45);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fit_expansion(spec, path, vp, {1, 2, 3}, ladder, 1e-12));
  }
}
BENCHMARK(BM_FitExpansion);

}  // namespace

BENCHMARK_MAIN();
