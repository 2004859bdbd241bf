#include <benchmark/benchmark.h>

#include "lrising/fgff/fgff.hpp"
#include "lrising/mc/enumerate.hpp"
#include "lrising/mc/sampler.hpp"
#include "lrising/model/susceptibility.hpp"
#include "lrising/numerics/epstein.hpp"
#include "lrising/numerics/rng.hpp"
#include "lrising/observables/observables.hpp"

using namespace lrising;

namespace {

model::TwoPointModel synthetic(int d, double alpha) {
  return model::TwoPointModel::synthetic({d, 1.0 / numerics::epstein_zeta(d, d + alpha), d + alpha, 0.0, 1.0});
}

void BM_CovarianceSeparable(benchmark::State& state) {
  const auto model = synthetic(2, 1.0);
  const auto f = testfn::TestFunction::gaussian({0.0, 0.0});
  const int L = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(observables::covariance(f, f, L, model, observables::Path::Separable));
}
BENCHMARK(BM_CovarianceSeparable)->RangeMultiplier(4)->Range(16, 256)->Unit(benchmark::kMillisecond);

void BM_CovarianceFourier(benchmark::State& state) {
  const auto model = synthetic(2, 1.0);
  const auto f = testfn::TestFunction::bump({0.0, 0.0});
  const int L = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(observables::covariance(f, f, L, model, observables::Path::Fourier));
}
BENCHMARK(BM_CovarianceFourier)->RangeMultiplier(4)->Range(16, 256)->Unit(benchmark::kMillisecond);

void BM_RenormalizedPair(benchmark::State& state) {
  const auto model = synthetic(2, 1.5);
  const auto f = testfn::TestFunction::gaussian({0.0, 0.0});
  const int L = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(observables::renormalized_pair_expectation({f, f, 1.5, L, 0}, model).value);
}
BENCHMARK(BM_RenormalizedPair)->RangeMultiplier(4)->Range(16, 256)->Unit(benchmark::kMillisecond);

void BM_SigmaL(benchmark::State& state) {
  const auto model = synthetic(2, 1.0);
  const int L = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(model::sigma_L(model, L));
}
BENCHMARK(BM_SigmaL)->RangeMultiplier(4)->Range(16, 512)->Unit(benchmark::kMillisecond);

void BM_KTildeGaussian(benchmark::State& state) {
  const auto g = testfn::TestFunction::gaussian({0.0, 0.0});
  const auto h = testfn::TestFunction::gaussian({0.3, -0.2}, 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(fgff::k_tilde(g, h, 1.5).value);
}
BENCHMARK(BM_KTildeGaussian)->Unit(benchmark::kMillisecond);

void BM_KTildeBump(benchmark::State& state) {
  const auto g = testfn::TestFunction::bump({0.0, 0.0});
  for (auto _ : state) benchmark::DoNotOptimize(fgff::k_tilde(g, g, 1.0).value);
}
BENCHMARK(BM_KTildeBump)->Unit(benchmark::kMillisecond);

void BM_MetropolisSweep(benchmark::State& state) {
  const model::InteractionSpec spec{2, 1.0, 1.0};
  const int n = static_cast<int>(state.range(0));
  auto chain = mc::make_chain(spec, model::RectBox({n, n}), 0.5 * model::beta_mean_field(spec));
  numerics::CounterRng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(mc::metropolis_sweep(chain, rng));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_MetropolisSweep)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_ClusterUpdate(benchmark::State& state) {
  const model::InteractionSpec spec{2, 1.0, 1.0};
  const int n = static_cast<int>(state.range(0));
  auto chain = mc::make_chain(spec, model::RectBox({n, n}), 0.5 * model::beta_mean_field(spec));
  numerics::CounterRng rng(2);
  std::int64_t flipped = 0;
  for (auto _ : state) flipped += mc::cluster_update(chain, rng);
  state.SetItemsProcessed(flipped);
}
BENCHMARK(BM_ClusterUpdate)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_ExactEnumeration(benchmark::State& state) {
  const model::InteractionSpec spec{2, 1.0, 1.0};
  const int b = static_cast<int>(state.range(0));
  const model::RectBox box({4, b});
  for (auto _ : state) benchmark::DoNotOptimize(mc::exact_enumerate(spec, 0.3, box).log_z);
}
BENCHMARK(BM_ExactEnumeration)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
