#include <vector>

#include <benchmark/benchmark.h>

#include "psd/mp_transform.hpp"
#include "psd/simulation.hpp"

using namespace psd;

namespace {

const DiscretePSD kThreeAtoms({2, 7, 10}, {0.3, 0.4, 0.3});
const LaguerrePSD kCase5({1.0 / 9, 1.0 / 9, 1.0 / 9});

void BM_CompanionStieltjes(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const auto spec = sample_spectrum(population_from_model(PointMassPSD(1.0), p), 2 * p, 1);
  double u = -1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(companion_stieltjes(u, spec));
    u = u < -9.0 ? -1.0 : u - 0.01;
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CompanionStieltjes)->RangeMultiplier(4)->Range(100, 1600)->Complexity();

void BM_MpUMapDiscrete(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mp_u_map(-0.05, kThreeAtoms, AspectRatio(0.1)));
}
BENCHMARK(BM_MpUMapDiscrete);

void BM_MpUMapLaguerre(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mp_u_map(0.8, kCase5, AspectRatio(1.0)));
}
BENCHMARK(BM_MpUMapLaguerre);

void BM_MpUMapInverseCubic(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mp_u_map(0.8, InverseCubicPSD(0.5), AspectRatio(0.5)));
}
BENCHMARK(BM_MpUMapInverseCubic);

void BM_FixedPointSolver(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_companion_fixed_point({3.0, 1e-6}, kThreeAtoms, AspectRatio(0.1)));
  }
}
BENCHMARK(BM_FixedPointSolver);

void BM_DensityCurve(benchmark::State& state) {
  const auto grid = midpoint_grid(0.0, 3.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lsd_density_curve(PointMassPSD(1.0), AspectRatio(0.25), grid));
}
BENCHMARK(BM_DensityCurve)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_SupportBounds(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(support_bounds(kThreeAtoms, AspectRatio(0.1)));
}
BENCHMARK(BM_SupportBounds)->Unit(benchmark::kMillisecond);

void BM_RealCompanionRoot(benchmark::State& state) {
  const RealCompanionSolver solver(kThreeAtoms, AspectRatio(0.1));
  for (auto _ : state) benchmark::DoNotOptimize(solver(-1.0));
}
BENCHMARK(BM_RealCompanionRoot);

void BM_SampleSpectrum(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const auto pop = population_from_model(DiscretePSD({1, 2}, {0.5, 0.5}), p);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_spectrum(pop, 500, ++seed));
}
BENCHMARK(BM_SampleSpectrum)->Arg(100)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
