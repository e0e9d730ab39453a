// SPDX-License-Identifier: Apache-2.0
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "detgeom/geometry.hpp"
#include "detgeom/losses.hpp"
#include "detgeom/proposals.hpp"

namespace {

std::vector<detgeom::Box> boxes(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> c(0.2, 0.8), s(0.05, 0.4);
  std::vector<detgeom::Box> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({c(rng), c(rng), s(rng), s(rng)});
  return out;
}

void BM_OverlapReport(benchmark::State& state) {
  const auto a = boxes(1024, 1), b = boxes(1024, 2);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(detgeom::overlap_report(a[i & 1023], b[i & 1023]));
    ++i;
  }
}
BENCHMARK(BM_OverlapReport);

void BM_IcsLoss(benchmark::State& state) {
  const auto a = boxes(1024, 3), b = boxes(1024, 4);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(detgeom::ics_loss(a[i & 1023], b[i & 1023]));
    ++i;
  }
}
BENCHMARK(BM_IcsLoss);

void BM_GenerateProposals(benchmark::State& state) {
  detgeom::ProposalConfig cfg;
  cfg.num_proposals = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(detgeom::generate_proposals(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenerateProposals)->Arg(300)->Arg(100000);

}  // namespace
