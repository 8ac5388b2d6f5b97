// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end classification: semantic search over an unlabeled pool,
// zero-shot self-prediction of the pool, and priming with the retrieved
// self-labeled neighbors. Also the iterative refinement of pool labels.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "soup/dataset.hpp"
#include "soup/index.hpp"
#include "soup/priming.hpp"
#include "soup/scorer.hpp"
#include "soup/task.hpp"

namespace soup {

/// Neighbor counts used for the standard sweeps.
inline constexpr std::array<std::size_t, 3> kNeighborPresets = {3, 10, 50};

struct SoupConfig {
  std::string task;
  std::size_t k = 10;
  Strategy strategy = Strategy::kBoc;
  WeightingKind weighting = WeightingKind::kUniform;
  std::size_t iterations = 3;
  /// Per-example token budget; nullopt sends no truncation limit.
  std::optional<std::size_t> example_token_budget = 120;
  std::size_t pool_cap = 10000;
  std::size_t test_cap = 10000;
  std::uint64_t seed = 0;
  /// Concurrent scorer calls. Results do not depend on it.
  std::size_t jobs = 1;

  /// Throws ConfigError when k == 0, a cap is 0 or jobs == 0.
  void validate() const;
  PrimingOptions priming() const { return {example_token_budget, jobs}; }
};

/// Self-prediction of a pool example: its calibrated zero-shot
/// distribution and that distribution's argmax.
struct SelfPrediction {
  LabelDistribution distribution;
  LabelId label = 0;

  static SelfPrediction from(LabelDistribution d) {
    const LabelId y = d.argmax();
    return {std::move(d), y};
  }
};

using SelfPredictions = std::map<std::string, SelfPrediction>;

/// Unlabeled examples, their embedding index and their current labels,
/// all covering the same id set.
class UnlabeledPool {
 public:
  /// Throws DomainError unless examples, index and predictions cover the same
  /// ids and every stored label is the argmax of its distribution.
  UnlabeledPool(std::vector<Example> examples, EmbeddingIndex index, SelfPredictions predictions);

  /// Keeps the examples of `ds` present in `index`; every indexed id must be
  /// in `ds`.
  static UnlabeledPool assemble(const Dataset& ds, EmbeddingIndex index, SelfPredictions predictions);

  std::size_t size() const noexcept { return examples_.size(); }
  bool empty() const noexcept { return examples_.empty(); }
  std::span<const Example> examples() const noexcept { return examples_; }
  const Example& example(std::string_view id) const;
  const EmbeddingIndex& index() const noexcept { return index_; }
  const SelfPredictions& self_predictions() const noexcept { return predictions_; }

  /// Same examples and index with replaced self-predictions.
  UnlabeledPool with_predictions(SelfPredictions predictions) const;

 private:
  std::vector<Example> examples_;
  std::unordered_map<std::string, std::size_t> rows_;
  EmbeddingIndex index_;
  SelfPredictions predictions_;
};

/// Text handed to the sentence encoder: the raw input, with a second field
/// appended after one space.
std::string embedding_text(const Example& x);

/// Embeds examples in batches of `batch_size`.
std::vector<std::vector<double>> embed_examples(const Encoder& encoder, std::span<const Example> examples,
                                                std::size_t batch_size = 64);

/// Subsamples `raw` to cfg.pool_cap, embeds it, builds the index and
/// self-predicts every example. Throws DomainError if nothing remains.
UnlabeledPool precompute_pool(const Scorer& scorer, const Encoder& encoder, const TaskConfig& task,
                              const Dataset& raw, const SoupConfig& cfg, const CalibrationTable& calib);

struct ClassifyResult {
  Prediction prediction;
  std::vector<NeighborHit> neighbors;
};

/// Retrieves the k nearest pool examples to `query` (never x itself), pairs
/// them with labels from `labels`, and primes per cfg.strategy.
ClassifyResult classify_with_vector(const Scorer& scorer, const UnlabeledPool& pool, const SelfPredictions& labels,
                                    const TaskConfig& task, const Example& x, std::span<const double> query,
                                    const SoupConfig& cfg, const CalibrationTable& calib);

/// Embeds x and classifies it against the pool's current labels.
ClassifyResult classify(const Scorer& scorer, const Encoder& encoder, const UnlabeledPool& pool,
                        const TaskConfig& task, const Example& x, const SoupConfig& cfg,
                        const CalibrationTable& calib);

/// Classifies many examples, up to cfg.jobs at a time. Output order follows
/// `xs`.
std::vector<ClassifyResult> classify_all(const Scorer& scorer, const Encoder& encoder, const UnlabeledPool& pool,
                                         const TaskConfig& task, std::span<const Example> xs,
                                         const SoupConfig& cfg, const CalibrationTable& calib);

/// Calibrated zero-shot prediction of the bare pattern, without priming.
Prediction prompt_only(const Scorer& scorer, const TaskConfig& task, const Example& x,
                       const CalibrationTable& calib, std::optional<std::size_t> budget = 120);

/// Called after each refinement iteration with the 1-based iteration number
/// and the number of pool labels that changed.
using IterationObserver = std::function<void(std::size_t iteration, std::size_t changed)>;

/// Reclassifies every pool example against the rest of the pool for
/// cfg.iterations rounds with uniform weighting. Each round reads only the
/// previous round's labels and replaces all of them at once. Examples with
/// no other pool member keep their label.
UnlabeledPool iterative_soup(const Scorer& scorer, const UnlabeledPool& pool, const TaskConfig& task,
                             const SoupConfig& cfg, const CalibrationTable& calib,
                             const IterationObserver& observer = {});

}  // namespace soup
