#include <benchmark/benchmark.h>

#include "amagcn/dataio.hpp"
#include "amagcn/kernels.hpp"
#include "amagcn/matrix.hpp"
#include "amagcn/pswe.hpp"
#include "amagcn/rng.hpp"

namespace {

using namespace amagcn;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                     double zero_fraction = 0.0) {
  Matrix m(rows, cols);
  Rng rng(seed);
  for (double& v : m.data)
    v = rng.uniform() < zero_fraction ? 0.0 : rng.normal();
  return m;
}

void bm_matmul_reference(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(n, n, 1);
  const Matrix b = random_matrix(n, n, 2);
  for (auto _ : state) {
    Matrix c = kernels::reference::matmul(a, b);
    benchmark::DoNotOptimize(c.data.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n * n * n));
}

void bm_matmul_parallel(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(n, n, 1);
  const Matrix b = random_matrix(n, n, 2);
  for (auto _ : state) {
    Matrix c = kernels::matmul(a, b);
    benchmark::DoNotOptimize(c.data.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n * n * n));
}

// Graph propagation multiplies sparse-ish adjacency blocks by feature
// matrices; the kernels skip zero entries, so sparsity matters.
void bm_matmul_parallel_sparse(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(n, n, 1, 0.9);
  const Matrix b = random_matrix(n, 16, 2);
  for (auto _ : state) {
    Matrix c = kernels::matmul(a, b);
    benchmark::DoNotOptimize(c.data.data());
  }
}

void bm_matmul_tn_parallel(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(n, 16, 1);
  const Matrix b = random_matrix(n, 16, 2);
  for (auto _ : state) {
    Matrix c = kernels::matmul_tn(a, b);
    benchmark::DoNotOptimize(c.data.data());
  }
}

dataio::SynthData bench_population(std::size_t n) {
  dataio::SynthSpec spec;
  spec.n = n;
  spec.feature_dim = 4;
  spec.seed = 3;
  return dataio::generate_synthetic(spec);
}

void bm_build_adjacency(benchmark::State& state) {
  const dataio::SynthData data = bench_population(static_cast<std::size_t>(state.range(0)));
  const auto intervals = pswe::resolve_intervals(data.table);
  const auto scores = pswe::score_measures(data.table, intervals);
  for (auto _ : state) {
    Matrix a = pswe::build_adjacency(data.table, scores, intervals);
    benchmark::DoNotOptimize(a.data.data());
  }
}

}  // namespace

BENCHMARK(bm_matmul_reference)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(bm_matmul_parallel)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(bm_matmul_parallel_sparse)->Arg(256)->Arg(512);
BENCHMARK(bm_matmul_tn_parallel)->Arg(256)->Arg(512);
BENCHMARK(bm_build_adjacency)->Arg(100)->Arg(300);

BENCHMARK_MAIN();
