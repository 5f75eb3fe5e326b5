#include <benchmark/benchmark.h>

#include "punn/baselines.hpp"
#include "punn/evolution.hpp"
#include "punn/netmodel.hpp"
#include "punn/synth.hpp"

using namespace punn;

namespace {

const Dataset& data() {
  static const Dataset d = [] {
    synth::SynthConfig c;
    c.max_patterns = 1000;
    return synth::generate(c);
  }();
  return d;
}

void BM_Predict(benchmark::State& state) {
  const auto ref = reference_punn();
  const auto& d = data();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict(ref, d[i].inputs));
    i = (i + 1) % d.size();
  }
}
BENCHMARK(BM_Predict);

void BM_NormalizedMse(benchmark::State& state) {
  const auto ref = reference_punn();
  const TrainingSet set(data(), ref.normalization());
  for (auto _ : state) benchmark::DoNotOptimize(set.normalized_mse(ref));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data().size()));
}
BENCHMARK(BM_NormalizedMse);

void BM_RefitOutputLayer(benchmark::State& state) {
  const auto ref = reference_punn();
  const TrainingSet set(data(), ref.normalization());
  for (auto _ : state) benchmark::DoNotOptimize(set.refit_output_layer(ref));
}
BENCHMARK(BM_RefitOutputLayer);

void BM_EvolveGenerations(benchmark::State& state) {
  auto cfg = EAConfig::defaults(BasisKind::ProductUnit);
  cfg.population_size = 100;
  cfg.generations = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(evolve(data(), cfg, BasisKind::ProductUnit));
}
BENCHMARK(BM_EvolveGenerations)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_LassoFit(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(fit_lasso(data(), 0.01));
}
BENCHMARK(BM_LassoFit)->Unit(benchmark::kMillisecond);

void BM_OrdinaryLeastSquares(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(fit_linear(data()));
}
BENCHMARK(BM_OrdinaryLeastSquares)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
