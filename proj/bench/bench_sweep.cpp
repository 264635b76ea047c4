// Serial vs OpenMP sweep kernels on a seeded spin-bath model. The parallel
// lane must be bitwise identical to the serial one, so this benchmark is the
// place where the speedup (or, on one core, the overhead) is visible.

#include <benchmark/benchmark.h>

#include "qee/sweep.hpp"

namespace {

qee::GeneratedModel bench_model() {
  qee::ModelRecipe recipe;
  recipe.seed = 42;
  recipe.n_spins = 4;
  recipe.thermal_beta = 1.0;
  return qee::generate_model(recipe);
}

const std::vector<double> kTaus = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
const std::vector<double> kTemperatures = {1.0, 10.0, 100.0};

void BM_SweepSpinSerial(benchmark::State& state) {
  const qee::GeneratedModel gm = bench_model();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        qee::sweep_tau_spin_serial(gm.model, kTaus, kTemperatures, 10.0, false));
  }
}
BENCHMARK(BM_SweepSpinSerial)->Unit(benchmark::kMillisecond);

void BM_SweepSpinParallel(benchmark::State& state) {
  const qee::GeneratedModel gm = bench_model();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        qee::sweep_tau_spin_parallel(gm.model, kTaus, kTemperatures, 10.0, false, threads));
  }
}
BENCHMARK(BM_SweepSpinParallel)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_SweepPhononSerial(benchmark::State& state) {
  const qee::PhononBathParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        qee::sweep_tau_phonon_serial(params, kTaus, kTemperatures, 50.0));
  }
}
BENCHMARK(BM_SweepPhononSerial)->Unit(benchmark::kMillisecond);

void BM_SweepPhononParallel(benchmark::State& state) {
  const qee::PhononBathParams params;
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        qee::sweep_tau_phonon_parallel(params, kTaus, kTemperatures, 50.0, threads));
  }
}
BENCHMARK(BM_SweepPhononParallel)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
