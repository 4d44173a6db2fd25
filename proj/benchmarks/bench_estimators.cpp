#include <benchmark/benchmark.h>

#include "psd/estimator.hpp"
#include "psd/simulation.hpp"

using namespace psd;

namespace {

SampleSpectrum draw(const PSDModel& truth, std::size_t p, std::size_t n) {
  return sample_spectrum(population_from_model(truth, p), n, 20130101);
}

void BM_BuildUNet(benchmark::State& state) {
  const auto spec = draw(DiscretePSD({1, 2}, {0.5, 0.5}), 100, 500);
  for (auto _ : state) benchmark::DoNotOptimize(build_unet(spec, ModelKind::Discrete, 20));
}
BENCHMARK(BM_BuildUNet);

void BM_FitDiscrete(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const PSDModel truth = k == 2 ? PSDModel(DiscretePSD({1, 2}, {0.5, 0.5}))
                                : PSDModel(DiscretePSD({1, 5, 15}, {0.3, 0.4, 0.3}));
  const auto spec = draw(truth, 100, 500);
  const auto net = build_unet(spec, ModelKind::Discrete, 20);
  for (auto _ : state) benchmark::DoNotOptimize(fit_discrete(spec, k, net));
}
BENCHMARK(BM_FitDiscrete)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_FitLaguerre(benchmark::State& state) {
  const auto spec = draw(LaguerrePSD({1.0 / 9, 1.0 / 9, 1.0 / 9}), 500, 500);
  const auto net = build_unet(spec, ModelKind::Laguerre, 20);
  for (auto _ : state) benchmark::DoNotOptimize(fit_laguerre(spec, 3, net));
}
BENCHMARK(BM_FitLaguerre)->Unit(benchmark::kMillisecond);

void BM_FitInverseCubic(benchmark::State& state) {
  const auto spec = draw(InverseCubicPSD(0.5), 488, 1000);
  const auto net = build_unet(spec, ModelKind::InverseCubic, 20);
  for (auto _ : state) benchmark::DoNotOptimize(fit_inverse_cubic(spec, net));
}
BENCHMARK(BM_FitInverseCubic)->Unit(benchmark::kMillisecond);

void BM_Wasserstein(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein(LaguerrePSD({0.3, 0.05}), LaguerrePSD({1.0})));
}
BENCHMARK(BM_Wasserstein)->Unit(benchmark::kMillisecond);

}  // namespace
