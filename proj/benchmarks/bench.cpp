#include <benchmark/benchmark.h>

#include "lshape/configurations.hpp"
#include "lshape/gowers.hpp"
#include "lshape/increment.hpp"
#include "lshape/random.hpp"
#include "lshape/spectral.hpp"

using namespace lshape;

static void BM_Dft(benchmark::State& state) {
  Rng rng(1);
  const auto f = random_one_bounded(rng, static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(dft(f));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.size()));
}
BENCHMARK(BM_Dft)->Args({3, 4})->Args({3, 6})->Args({3, 8})->Args({5, 4});

static void BM_GowersRecursive(benchmark::State& state) {
  Rng rng(2);
  const auto f = random_one_bounded(rng, 3, static_cast<int>(state.range(0)));
  const int s = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(gowers_u(f, s));
}
BENCHMARK(BM_GowersRecursive)->Args({2, 4})->Args({3, 3})->Args({4, 3});

static void BM_GowersDefinition(benchmark::State& state) {
  Rng rng(2);
  const auto f = random_one_bounded(rng, 3, static_cast<int>(state.range(0)));
  const int s = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(gowers_u(f, s, {}, true));
}
BENCHMARK(BM_GowersDefinition)->Args({2, 4})->Args({3, 3})->Unit(benchmark::kMillisecond);

static void BM_CountL(benchmark::State& state) {
  Rng rng(3);
  const int n = static_cast<int>(state.range(0));
  const auto s = random_set(rng, 3, 2 * n, 1.0 / 3.0);
  for (auto _ : state) benchmark::DoNotOptimize(count_L(s));
}
BENCHMARK(BM_CountL)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_LambdaComplex(benchmark::State& state) {
  Rng rng(4);
  const int n = static_cast<int>(state.range(0));
  const auto g = random_one_bounded(rng, 3, 2 * n);
  for (auto _ : state) benchmark::DoNotOptimize(lambda_L(g, g, g, g));
}
BENCHMARK(BM_LambdaComplex)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_Pseudorandomize(benchmark::State& state) {
  Rng rng(5);
  const auto t = full_T(3, 3);
  const auto s = random_set(rng, 3, 6, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(pseudorandomize_u2(t, s, 0.1, 0.1));
}
BENCHMARK(BM_Pseudorandomize)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
