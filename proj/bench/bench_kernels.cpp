// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "qmc/kernels.hpp"
#include "qmc/langevin_oracle.hpp"

namespace {

using namespace qmc;

void BM_OracleGridSerial(benchmark::State& state) {
  const auto grid = kernels::default_oracle_grid(41, 26);
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::oracle_grid_serial(grid, kernels::closed_form_variance));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}

void BM_OracleGridParallel(benchmark::State& state) {
  const auto grid = kernels::default_oracle_grid(41, 26);
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::oracle_grid_parallel(grid, kernels::closed_form_variance));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}

DeviceModel crossing_device() {
  ModeFamily t;
  t.d1 = kTwoPi * 25e9;
  t.d2 = kTwoPi * 26.5e3;
  t.kappa = kTwoPi * 12.14e6;
  CrossingFamily c;
  c.g_coupling = kTwoPi * 40e6;
  c.kappa_c = kTwoPi * 20e6;
  c.d1_c = kTwoPi * (25e9 + 300e6);
  c.k0 = -24;
  return DeviceModel(t, {c}, ExtractionTable(0.85));
}

void BM_SpectrumSerial(benchmark::State& state) {
  const auto dev = crossing_device();
  const PumpCondition pump{0.8, 0.4, 0.85, 0.9};
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::spectrum_serial(dev, pump, 1, static_cast<int>(state.range(0)), {}));
}

void BM_SpectrumParallel(benchmark::State& state) {
  const auto dev = crossing_device();
  const PumpCondition pump{0.8, 0.4, 0.85, 0.9};
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::spectrum_parallel(dev, pump, 1, static_cast<int>(state.range(0)), {}));
}

kernels::ChainSpec chain_spec() {
  const auto dyn = drift_matrix(0.5, 1.0, 0.0);
  kernels::ChainSpec spec;
  spec.drift = dyn.drift;
  spec.coupling_e = Eigen::Vector4d::Constant(std::sqrt(2.0));
  spec.coupling_i = Eigen::Vector4d::Zero();
  spec.direction = Eigen::Vector4d(1, 0, 1, 0) / std::sqrt(2.0);
  spec.step = 0.05;
  spec.steps_per_window = 8000;
  spec.windows = 4;
  spec.burn_steps = 400;
  spec.seed = 7;
  return spec;
}

void BM_ChainsSerial(benchmark::State& state) {
  const auto spec = chain_spec();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::chains_serial(spec, 8));
}

void BM_ChainsParallel(benchmark::State& state) {
  const auto spec = chain_spec();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::chains_parallel(spec, 8));
}

}  // namespace

BENCHMARK(BM_OracleGridSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleGridParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpectrumSerial)->Arg(64)->Arg(1024);
BENCHMARK(BM_SpectrumParallel)->Arg(64)->Arg(1024);
BENCHMARK(BM_ChainsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ChainsParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
