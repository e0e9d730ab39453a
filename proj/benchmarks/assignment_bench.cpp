// SPDX-License-Identifier: Apache-2.0
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "detgeom/assignment.hpp"
#include "detgeom/proposals.hpp"

namespace {

void BM_Hungarian(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  detgeom::CostMatrix c(n, 3 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 3 * n; ++j) c(i, j) = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(detgeom::hungarian_assign(c));
}
BENCHMARK(BM_Hungarian)->Arg(8)->Arg(32)->Arg(100);

void BM_SimOta(benchmark::State& state) {
  // 300 noisy image-size proposals against a handful of tables.
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> c(0.2, 0.8), s(0.1, 0.4), p(0.05, 0.95);
  std::vector<detgeom::LabeledBox> gts;
  for (int i = 0; i < state.range(0); ++i) gts.push_back({{c(rng), c(rng), s(rng), s(rng)}, 0});
  std::vector<detgeom::ScoredPrediction> preds;
  for (const auto& b : detgeom::generate_proposals({})) preds.push_back({b, {p(rng)}});
  for (auto _ : state) benchmark::DoNotOptimize(detgeom::simota_assign(gts, preds, 6));
}
BENCHMARK(BM_SimOta)->Arg(1)->Arg(5)->Arg(20);

void BM_Nms(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> c(0.2, 0.8), s(0.05, 0.3), p(0.0, 1.0);
  std::vector<detgeom::ScoredBox> dets;
  for (int i = 0; i < state.range(0); ++i) dets.push_back({{c(rng), c(rng), s(rng), s(rng)}, p(rng)});
  for (auto _ : state) benchmark::DoNotOptimize(detgeom::nms(dets, 0.5));
}
BENCHMARK(BM_Nms)->Arg(300)->Arg(3000);

}  // namespace
