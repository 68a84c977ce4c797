// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "dpsqkd/adversary.hpp"
#include "dpsqkd/entropy.hpp"

namespace {

void BM_ConditionalEntropy(benchmark::State& state) {
  dpsqkd::Rng rng(5);
  const auto dim = static_cast<Eigen::Index>(state.range(0));
  const auto cq = dpsqkd::entropy::sample_cq_state(dim, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dpsqkd::entropy::conditional_entropy_cq(cq));
  }
}
BENCHMARK(BM_ConditionalEntropy)->Arg(4)->Arg(8)->Arg(16);

void BM_DisjointSupportCheck(benchmark::State& state) {
  dpsqkd::Rng rng(6);
  const auto cq = dpsqkd::entropy::sample_disjoint_cq_state(8, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dpsqkd::entropy::disjoint_support_check(cq, 1e-6));
  }
}
BENCHMARK(BM_DisjointSupportCheck);

void BM_FloorObjective(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int dim = (1 << (n - 1)) - 1;
  dpsqkd::Rng rng(7);
  const auto set = dpsqkd::adversary::AdversaryStateSet::rescaled(
      n, dpsqkd::entropy::random_complex_matrix(dim, Eigen::Index{1} << n, rng));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dpsqkd::adversary::conditional_entropy_objective(set));
  }
}
BENCHMARK(BM_FloorObjective)->Arg(3)->Arg(4)->Arg(5);

}  // namespace
