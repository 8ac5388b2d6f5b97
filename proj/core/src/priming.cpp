// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0

#include "soup/priming.hpp"

#include <algorithm>
#include <cmath>

#include "soup/error.hpp"
#include "soup/parallel.hpp"

namespace soup {

std::string_view to_string(WeightingKind kind) {
  return kind == WeightingKind::kUniform ? "uniform" : "similarity";
}

std::string_view to_string(Strategy strategy) { return strategy == Strategy::kBoc ? "boc" : "concat"; }

WeightingKind parse_weighting(std::string_view s) {
  if (s == "uniform") return WeightingKind::kUniform;
  if (s == "similarity") return WeightingKind::kSimilarity;
  throw ConfigError("unknown weighting '" + std::string(s) + "' (expected uniform or similarity)");
}

Strategy parse_strategy(std::string_view s) {
  if (s == "boc") return Strategy::kBoc;
  if (s == "concat") return Strategy::kConcat;
  throw ConfigError("unknown strategy '" + std::string(s) + "' (expected boc or concat)");
}

double weight(WeightingKind kind, const Neighbor& neighbor) {
  switch (kind) {
    case WeightingKind::kUniform:
      return 1.0;
    case WeightingKind::kSimilarity:
      return std::max(neighbor.similarity, 0.0);
  }
  return 1.0;
}

ScoreRequest build_boc_context(const TaskConfig& task, const Neighbor& neighbor, const Example& x,
                               std::optional<std::size_t> budget) {
  return ScoreRequest{
      {{render_filled_pattern(task, neighbor.example, neighbor.predicted_label), budget},
       {render_pattern(task, x), budget}},
      task.candidates(),
  };
}

ScoreRequest build_concat_context(const TaskConfig& task, std::span<const Neighbor> neighbors, const Example& x,
                                  std::optional<std::size_t> budget) {
  if (neighbors.empty()) throw DomainError("concat priming needs at least one neighbor");
  std::vector<const Neighbor*> order;
  order.reserve(neighbors.size());
  for (const auto& n : neighbors) order.push_back(&n);
  std::stable_sort(order.begin(), order.end(), [](const Neighbor* a, const Neighbor* b) {
    if (a->similarity != b->similarity) return a->similarity > b->similarity;
    return a->example.id < b->example.id;
  });

  ScoreRequest request;
  request.parts.reserve(neighbors.size() + 1);
  for (const Neighbor* n : order) {
    request.parts.push_back({render_filled_pattern(task, n->example, n->predicted_label), budget});
  }
  request.parts.push_back({render_pattern(task, x), budget});
  request.candidates = task.candidates();
  return request;
}

LabelDistribution weighted_average(std::span<const LabelDistribution> dists, std::span<const double> weights) {
  if (dists.empty()) throw DomainError("cannot average zero label distributions");
  if (dists.size() != weights.size()) throw DomainError("one weight per distribution required");
  const std::size_t num_labels = dists.front().size();

  double z = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("priming weights must be finite and non-negative");
    z += w;
  }
  const bool fallback = z == 0.0;
  if (fallback) z = static_cast<double>(dists.size());

  std::vector<double> mixed(num_labels, 0.0);
  for (std::size_t i = 0; i < dists.size(); ++i) {
    if (dists[i].size() != num_labels) throw DomainError("label distributions differ in size");
    const double w = fallback ? 1.0 : weights[i];
    for (LabelId y = 0; y < num_labels; ++y) mixed[y] += w * dists[i][y];
  }
  for (double& p : mixed) p = std::min(p / z, 1.0);
  return LabelDistribution(std::move(mixed));
}

Prediction classify_boc(const Scorer& scorer, const TaskConfig& task, std::span<const Neighbor> neighbors,
                        const Example& x, WeightingKind kind, const CalibrationTable& calib,
                        const PrimingOptions& options) {
  if (neighbors.empty()) throw DomainError("bag-of-contexts priming needs at least one neighbor");

  std::vector<LabelDistribution> per_context(neighbors.size());
  parallel_for(neighbors.size(), options.jobs, [&](std::size_t i) {
    per_context[i] =
        zero_shot_distribution(scorer, task, build_boc_context(task, neighbors[i], x, options.budget), calib);
  });

  std::vector<double> weights;
  weights.reserve(neighbors.size());
  for (const auto& n : neighbors) weights.push_back(weight(kind, n));

  auto q = weighted_average(per_context, weights);
  const LabelId label = q.argmax();
  return {std::move(q), label};
}

Prediction classify_concat(const Scorer& scorer, const TaskConfig& task, std::span<const Neighbor> neighbors,
                           const Example& x, const CalibrationTable& calib, const PrimingOptions& options) {
  auto q = zero_shot_distribution(scorer, task, build_concat_context(task, neighbors, x, options.budget), calib);
  const LabelId label = q.argmax();
  return {std::move(q), label};
}

}  // namespace soup
