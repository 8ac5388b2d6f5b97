// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0
//
// In-context priming with self-labeled neighbors: concatenation priming and
// bag-of-contexts priming with weighted averaging of per-context label
// distributions.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "soup/scorer.hpp"
#include "soup/task.hpp"

namespace soup {

enum class WeightingKind { kUniform, kSimilarity };
enum class Strategy { kBoc, kConcat };

std::string_view to_string(WeightingKind kind);
std::string_view to_string(Strategy strategy);
/// Throws ConfigError for unknown spellings.
WeightingKind parse_weighting(std::string_view s);
Strategy parse_strategy(std::string_view s);

/// A retrieved pool example with its similarity to the query and its
/// self-predicted (hard) label.
struct Neighbor {
  Example example;
  double similarity = 0.0;
  LabelId predicted_label = 0;
};

struct Prediction {
  LabelDistribution distribution;
  LabelId label = 0;
};

struct PrimingOptions {
  /// Per-part token budget sent to the scorer; nullopt disables truncation.
  std::optional<std::size_t> budget = 120;
  /// Upper bound on concurrent scorer calls inside classify_boc.
  std::size_t jobs = 1;
};

/// uniform: 1. similarity: the cosine similarity clamped at 0.
double weight(WeightingKind kind, const Neighbor& neighbor);

/// [filled pattern of the neighbor; masked pattern of x], both budgeted.
ScoreRequest build_boc_context(const TaskConfig& task, const Neighbor& neighbor, const Example& x,
                               std::optional<std::size_t> budget);

/// Filled patterns of all neighbors, nearest first (ties by ascending id),
/// followed by the masked pattern of x. Throws DomainError if empty.
ScoreRequest build_concat_context(const TaskConfig& task, std::span<const Neighbor> neighbors, const Example& x,
                                  std::optional<std::size_t> budget);

/// sum_i w_i q_i / sum_i w_i, accumulated in label order. All-zero weights
/// fall back to uniform weights. Throws DomainError on empty input, size
/// mismatch, or negative weights.
LabelDistribution weighted_average(std::span<const LabelDistribution> dists, std::span<const double> weights);

/// Bag-of-contexts priming: one scorer call per neighbor, each calibrated,
/// then weighted by `kind` and averaged.
Prediction classify_boc(const Scorer& scorer, const TaskConfig& task, std::span<const Neighbor> neighbors,
                        const Example& x, WeightingKind kind, const CalibrationTable& calib,
                        const PrimingOptions& options = {});

/// Concatenation priming: a single scorer call on all neighbors at once.
Prediction classify_concat(const Scorer& scorer, const TaskConfig& task, std::span<const Neighbor> neighbors,
                           const Example& x, const CalibrationTable& calib, const PrimingOptions& options = {});

}  // namespace soup
