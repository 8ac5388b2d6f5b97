// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "soup/index.hpp"

namespace {

soup::EmbeddingIndex random_index(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<soup::EmbeddingRecord> records;
  records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(d);
    for (double& x : v) x = g(rng);
    records.push_back({"r" + std::to_string(i), std::move(v)});
  }
  return soup::EmbeddingIndex::build(records);
}

void BM_Search(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 rng(1);
  const auto index = random_index(n, d, rng);
  std::normal_distribution<double> g;
  std::vector<double> query(d);
  for (double& x : query) x = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(index.search(query, 50));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Search)->Args({1000, 64})->Args({10000, 384})->Args({10000, 768});

void BM_Build(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  std::vector<soup::EmbeddingRecord> records;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(384);
    for (double& x : v) x = g(rng);
    records.push_back({"r" + std::to_string(i), std::move(v)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(soup::EmbeddingIndex::build(records));
}
BENCHMARK(BM_Build)->Arg(1000)->Arg(10000);

}  // namespace
