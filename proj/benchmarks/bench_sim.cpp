// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "dpsqkd/adversary.hpp"
#include "dpsqkd/sim.hpp"

namespace {

void BM_ProtocolBlocks(benchmark::State& state) {
  const dpsqkd::keyrate::ProtocolParams params{3, 1.0, 0.1, 0.5, 2.0, 0.0};
  const auto blocks = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dpsqkd::sim::run_protocol(
        params, {dpsqkd::adversary::AttackConfig::Mode::none}, blocks, seed++));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(blocks));
}
BENCHMARK(BM_ProtocolBlocks)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_InterceptResendBlocks(benchmark::State& state) {
  const dpsqkd::keyrate::ProtocolParams params{3, 3.0, 0.5, 0.5, 2.0, 0.0};
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dpsqkd::sim::run_protocol(
        params, {dpsqkd::adversary::AttackConfig::Mode::intercept_resend}, 10000, seed++));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 10000);
}
BENCHMARK(BM_InterceptResendBlocks)->Unit(benchmark::kMillisecond);

void BM_IntensityCap(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dpsqkd::adversary::max_intensity(n, 1e-4));
  }
}
BENCHMARK(BM_IntensityCap)->Arg(3)->Arg(6);

}  // namespace
