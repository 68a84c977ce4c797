// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "dpsqkd/source.hpp"

namespace {

void BM_BlockStateConstruction(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int nu = static_cast<int>(state.range(1));
  const dpsqkd::source::BitString s(static_cast<std::size_t>(n), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dpsqkd::source::block_state(s, nu));
  }
}
BENCHMARK(BM_BlockStateConstruction)->Args({4, 3})->Args({6, 5})->Args({8, 7});

void BM_SpanDimension(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dpsqkd::source::span_dimension(n, n - 2));
  }
}
BENCHMARK(BM_SpanDimension)->Arg(4)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_PairwiseOverlap(benchmark::State& state) {
  const auto a = dpsqkd::source::block_state({0, 1, 0, 1, 0, 1}, 4);
  const auto b = dpsqkd::source::block_state({0, 0, 1, 1, 0, 0}, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dpsqkd::fock::inner_product(a, b));
  }
}
BENCHMARK(BM_PairwiseOverlap);

}  // namespace
