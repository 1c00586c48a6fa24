#include <benchmark/benchmark.h>

#include "fracgrowth/crack_mask.hpp"
#include "fracgrowth/elastic_solver.hpp"
#include "fracgrowth/evolution.hpp"
#include "fracgrowth/geometry.hpp"

using namespace fracgrowth;

static void BM_Hausdorff(benchmark::State& state) {
  const auto curve = shared_koch_curve();
  const auto a = prefractal(*curve, static_cast<int>(state.range(0)));
  const auto b = prefractal(*curve, static_cast<int>(state.range(0)) + 1);
  for (auto _ : state) benchmark::DoNotOptimize(hausdorff_distance(a, b));
}
BENCHMARK(BM_Hausdorff)->Arg(4)->Arg(5)->Arg(6);

static void BM_Rasterize(benchmark::State& state) {
  const auto d = Domain::unit_square(1.0 / static_cast<double>(state.range(0)));
  const auto crack = koch_family({0.0, 0.5}).with_tip(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(rasterize_crack(crack, d, 6).severed_count());
}
BENCHMARK(BM_Rasterize)->Arg(64)->Arg(256);

static void BM_SolveScalar(benchmark::State& state) {
  const auto d = Domain::unit_square(1.0 / static_cast<double>(state.range(0)));
  const auto m = rasterize_crack(koch_family({0.0, 0.5}).with_tip(0.8), d, 6);
  const auto datum = interpolate(d, m, Polynomial2{0.0, 0.4, 1.0});
  const auto f = state.range(1) == 0 ? Integrand::quadratic() : Integrand::p_power(1.5);
  for (auto _ : state) benchmark::DoNotOptimize(solve_scalar(d, m, f, datum).energy);
}
BENCHMARK(BM_SolveScalar)->Args({64, 0})->Args({128, 0})->Args({64, 1})->Unit(benchmark::kMillisecond);

static void BM_SolvePlanar(benchmark::State& state) {
  const auto d = Domain::unit_square(1.0 / static_cast<double>(state.range(0)));
  const auto m = rasterize_crack(koch_family({0.0, 0.5}).with_tip(0.8), d, 6);
  const auto datum = interpolate(d, m, Polynomial2{}, Polynomial2{0.0, 0.0, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(solve_planar(d, m, ElasticityTensor(0.5, 1.0), datum).energy);
}
BENCHMARK(BM_SolvePlanar)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
