// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "soup/mock.hpp"
#include "soup/priming.hpp"

namespace {

std::vector<soup::LabelDistribution> random_dists(std::size_t k, std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<soup::LabelDistribution> out;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> p(n);
    double s = 0;
    for (double& x : p) s += x = u(rng);
    for (double& x : p) x /= s;
    out.emplace_back(std::move(p));
  }
  return out;
}

void BM_WeightedAverage(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  const auto dists = random_dists(k, 10, rng);
  const std::vector<double> weights(k, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(soup::weighted_average(dists, weights));
}
BENCHMARK(BM_WeightedAverage)->Arg(3)->Arg(10)->Arg(50);

// End-to-end bag-of-contexts classification against the in-memory mock
// scorer: measures prompt rendering, request assembly and aggregation.
void BM_ClassifyBoc(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto task = *soup::find_builtin_task("yelp");
  soup::mock::MockScorer scorer;
  std::vector<soup::Neighbor> neighbors;
  for (std::size_t i = 0; i < k; ++i) {
    neighbors.push_back({{"n" + std::to_string(i), "The pasta was fine but the service slow.", std::nullopt,
                          std::nullopt},
                         0.5,
                         i % 5});
  }
  const soup::Example x{"x", "Great tacos, rude staff, would come back anyway.", std::nullopt, std::nullopt};
  const auto calib = soup::calibrate(scorer, task);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        soup::classify_boc(scorer, task, neighbors, x, soup::WeightingKind::kUniform, calib));
    scorer.clear_log();
  }
}
BENCHMARK(BM_ClassifyBoc)->Arg(3)->Arg(10)->Arg(50);

}  // namespace
