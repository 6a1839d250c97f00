#include <benchmark/benchmark.h>

#include "lindqmc/bss.hpp"
#include "lindqmc/lattice.hpp"
#include "lindqmc/sampler.hpp"

namespace {

using namespace lindqmc;

struct Fixture {
  explicit Fixture(int l, int n_t = 20)
      : spectrum(Lattice(l, l).adjacency()),
        params{1.0, 4.0, 0.05, n_t, 8},
        props(SlicePropagators::make(spectrum, 1.0, 0.05, n_t, Observable::echo)),
        config(FieldConfig::random(n_t, l * l, 1)) {}

  HoppingSpectrum spectrum;
  ModelParams params;
  SlicePropagators props;
  FieldConfig config;
};

void BM_Wrap(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  auto g = green_from_scratch(f.config, f.props, f.params.lambda(), 1, 10);
  for (auto _ : state) {
    wrap(g, f.props, f.config, f.params.lambda());
    if (g.position == f.params.n_t) g.position = 0;
    benchmark::DoNotOptimize(g.g.data());
  }
}
BENCHMARK(BM_Wrap)->Arg(4)->Arg(6)->Arg(8);

void BM_FlipUpdate(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  auto g = green_from_scratch(f.config, f.props, f.params.lambda(), 1, 10);
  int x = 0;
  int s = 1;
  for (auto _ : state) {
    const auto ratio = flip_ratio(g, s, f.params.lambda(), x);
    apply_flip(g, ratio, x);
    s = -s;
    benchmark::DoNotOptimize(g.g.data());
  }
}
BENCHMARK(BM_FlipUpdate)->Arg(4)->Arg(6)->Arg(8);

void BM_GreenFromScratch(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto g = green_from_scratch(f.config, f.props, f.params.lambda(), 10, 10);
    benchmark::DoNotOptimize(g.g.data());
  }
}
BENCHMARK(BM_GreenFromScratch)->Arg(4)->Arg(6)->Arg(8);

void BM_LogWeight(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_weight(f.config, f.props, f.params.lambda(), 10));
  }
}
BENCHMARK(BM_LogWeight)->Arg(4)->Arg(6)->Arg(8);

void BM_Sweep(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  StabilizedGreen green(f.props, f.params.lambda(), 10, 1e-6);
  Rng rng(3);
  for (auto _ : state) {
    const auto stats = sweep(green, f.config, rng);
    benchmark::DoNotOptimize(stats.accepted);
  }
}
BENCHMARK(BM_Sweep)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_Chain(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  ChainSettings settings;
  settings.n_warmup = 10;
  settings.n_sweeps = 40;
  settings.seed = 5;
  for (auto _ : state) {
    auto chain = run_chain(settings, f.spectrum, f.params, 3, Observable::purity);
    benchmark::DoNotOptimize(chain.samples.data());
  }
}
BENCHMARK(BM_Chain)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
