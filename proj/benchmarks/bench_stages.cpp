#include <benchmark/benchmark.h>

#include <map>
#include <string>
#include <utility>

#include "hsipca/hypercube.hpp"
#include "hsipca/jacobi.hpp"
#include "hsipca/pca.hpp"

namespace {

using namespace hsipca;

// Cubes are shared between benchmarks of the same shape.
const HyperCube& cube_for(std::size_t side, std::size_t bands) {
  static std::map<std::pair<std::size_t, std::size_t>, HyperCube> cache;
  auto it = cache.find({side, bands});
  if (it == cache.end()) {
    const auto sigs = builtin_signatures(bands, 10, 1);
    it = cache.emplace(std::pair{side, bands},
                       generate_synthetic(sigs, side, side, 10, 70.0, 1).cube).first;
  }
  return it->second;
}

void BM_MeanCenter(benchmark::State& state) {
  const HyperCube& cube = cube_for(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(mean_center(cube));
  state.SetItemsProcessed(state.iterations() * cube.data().size());
}

void BM_Covariance(benchmark::State& state) {
  const CenteredCube x = mean_center(cube_for(state.range(0), state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(covariance(x));
}

void BM_CovarianceBlocked(benchmark::State& state) {
  const CenteredCube x = mean_center(cube_for(state.range(0), state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(covariance_blocked(x, state.range(2)));
}

void BM_Jacobi(benchmark::State& state) {
  const SymMatrix c = covariance(mean_center(cube_for(64, state.range(0))));
  JacobiConfig cfg;
  cfg.strategy = static_cast<PivotStrategy>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(jacobi_eigen(c, cfg));
  state.SetLabel(std::string(to_string(cfg.strategy)));
}

void BM_Project(benchmark::State& state) {
  const CenteredCube x = mean_center(cube_for(state.range(0), state.range(1)));
  const EigenDecomposition eig = jacobi_eigen(covariance(x));
  for (auto _ : state) benchmark::DoNotOptimize(project(x, eig, state.range(2)));
}

}  // namespace

BENCHMARK(BM_MeanCenter)->Args({100, 50})->Args({300, 50})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Covariance)->Args({100, 50})->Args({300, 50})->Args({300, 100})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CovarianceBlocked)->Args({300, 50, 4})->Args({300, 50, 16})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Jacobi)
    ->ArgsProduct({{20, 50, 100}, {0, 1, 2}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Project)->Args({300, 50, 1})->Args({300, 50, 5})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
