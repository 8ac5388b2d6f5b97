// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0

#include "soup/pipeline.hpp"

#include <algorithm>
#include <set>

#include "soup/error.hpp"
#include "soup/parallel.hpp"

namespace soup {

void SoupConfig::validate() const {
  if (k == 0) throw ConfigError("k must be at least 1");
  if (pool_cap == 0 || test_cap == 0) throw ConfigError("pool and test caps must be at least 1");
  if (jobs == 0) throw ConfigError("jobs must be at least 1");
  if (example_token_budget && *example_token_budget == 0) throw ConfigError("token budget must be positive");
}

UnlabeledPool::UnlabeledPool(std::vector<Example> examples, EmbeddingIndex index, SelfPredictions predictions)
    : examples_(std::move(examples)), index_(std::move(index)), predictions_(std::move(predictions)) {
  for (std::size_t row = 0; row < examples_.size(); ++row) {
    const auto& id = examples_[row].id;
    if (!rows_.emplace(id, row).second) throw DomainError("duplicate pool id '" + id + "'");
    if (!index_.contains(id)) throw DomainError("pool example '" + id + "' is not in the embedding index");
    auto it = predictions_.find(id);
    if (it == predictions_.end()) throw DomainError("pool example '" + id + "' has no self-prediction");
    if (it->second.label != it->second.distribution.argmax()) {
      throw DomainError("self-prediction label of '" + id + "' is not the argmax of its distribution");
    }
  }
  if (index_.size() != examples_.size() || predictions_.size() != examples_.size()) {
    throw DomainError("pool examples, index and self-predictions cover different ids");
  }
}

UnlabeledPool UnlabeledPool::assemble(const Dataset& ds, EmbeddingIndex index, SelfPredictions predictions) {
  std::vector<Example> kept;
  kept.reserve(index.size());
  for (const auto& ex : ds.examples) {
    if (index.contains(ex.id)) kept.push_back(ex);
  }
  if (kept.size() != index.size()) {
    throw DomainError("embedding cache holds ids that are not in the pool dataset");
  }
  return UnlabeledPool(std::move(kept), std::move(index), std::move(predictions));
}

const Example& UnlabeledPool::example(std::string_view id) const {
  auto it = rows_.find(std::string(id));
  if (it == rows_.end()) throw DomainError("no pool example '" + std::string(id) + "'");
  return examples_[it->second];
}

UnlabeledPool UnlabeledPool::with_predictions(SelfPredictions predictions) const {
  return UnlabeledPool(examples_, index_, std::move(predictions));
}

std::string embedding_text(const Example& x) {
  if (!x.text_pair) return x.text;
  return x.text + " " + *x.text_pair;
}

std::vector<std::vector<double>> embed_examples(const Encoder& encoder, std::span<const Example> examples,
                                                std::size_t batch_size) {
  std::vector<std::vector<double>> out;
  out.reserve(examples.size());
  for (std::size_t start = 0; start < examples.size(); start += batch_size) {
    const std::size_t end = std::min(examples.size(), start + batch_size);
    std::vector<std::string> texts;
    texts.reserve(end - start);
    for (std::size_t i = start; i < end; ++i) texts.push_back(embedding_text(examples[i]));
    for (auto& v : embed(encoder, texts)) {
      if (!out.empty() && v.size() != out.front().size()) {
        throw ProtocolError("encoder dimension changed between batches");
      }
      out.push_back(std::move(v));
    }
  }
  return out;
}

UnlabeledPool precompute_pool(const Scorer& scorer, const Encoder& encoder, const TaskConfig& task,
                              const Dataset& raw, const SoupConfig& cfg, const CalibrationTable& calib) {
  cfg.validate();
  if (raw.examples.empty()) throw DomainError("unlabeled pool is empty");
  Dataset sampled = subsample(raw, cfg.pool_cap, cfg.seed);

  const auto vectors = embed_examples(encoder, sampled.examples);
  std::vector<EmbeddingRecord> records;
  records.reserve(sampled.size());
  for (std::size_t i = 0; i < sampled.size(); ++i) records.push_back({sampled.examples[i].id, vectors[i]});
  auto index = EmbeddingIndex::build(records);

  std::vector<LabelDistribution> dists(sampled.size());
  parallel_for(sampled.size(), cfg.jobs, [&](std::size_t i) {
    dists[i] = zero_shot_distribution(scorer, task, render_pattern(task, sampled.examples[i]), calib,
                                      cfg.example_token_budget);
  });
  SelfPredictions predictions;
  for (std::size_t i = 0; i < sampled.size(); ++i) {
    predictions.emplace(sampled.examples[i].id, SelfPrediction::from(std::move(dists[i])));
  }
  return UnlabeledPool(std::move(sampled.examples), std::move(index), std::move(predictions));
}

namespace {

ClassifyResult classify_impl(const Scorer& scorer, const UnlabeledPool& pool, const SelfPredictions& labels,
                             const TaskConfig& task, const Example& x, std::span<const double> query,
                             const SoupConfig& cfg, WeightingKind weighting, std::size_t inner_jobs,
                             const CalibrationTable& calib) {
  if (pool.empty()) throw DomainError("cannot classify against an empty pool");
  std::set<std::string, std::less<>> exclude;
  if (pool.index().contains(x.id)) exclude.insert(x.id);

  ClassifyResult result;
  result.neighbors = pool.index().search(query, cfg.k, exclude);
  if (result.neighbors.empty()) throw DomainError("no pool example other than '" + x.id + "' to prime with");

  std::vector<Neighbor> neighbors;
  neighbors.reserve(result.neighbors.size());
  for (const auto& hit : result.neighbors) {
    neighbors.push_back({pool.example(hit.id), hit.similarity, labels.at(hit.id).label});
  }

  PrimingOptions options{cfg.example_token_budget, inner_jobs};
  result.prediction = cfg.strategy == Strategy::kBoc
                          ? classify_boc(scorer, task, neighbors, x, weighting, calib, options)
                          : classify_concat(scorer, task, neighbors, x, calib, options);
  return result;
}

}  // namespace

ClassifyResult classify_with_vector(const Scorer& scorer, const UnlabeledPool& pool, const SelfPredictions& labels,
                                    const TaskConfig& task, const Example& x, std::span<const double> query,
                                    const SoupConfig& cfg, const CalibrationTable& calib) {
  cfg.validate();
  return classify_impl(scorer, pool, labels, task, x, query, cfg, cfg.weighting, cfg.jobs, calib);
}

ClassifyResult classify(const Scorer& scorer, const Encoder& encoder, const UnlabeledPool& pool,
                        const TaskConfig& task, const Example& x, const SoupConfig& cfg,
                        const CalibrationTable& calib) {
  const auto query = embed_examples(encoder, std::span(&x, 1));
  return classify_with_vector(scorer, pool, pool.self_predictions(), task, x, query.front(), cfg, calib);
}

std::vector<ClassifyResult> classify_all(const Scorer& scorer, const Encoder& encoder, const UnlabeledPool& pool,
                                         const TaskConfig& task, std::span<const Example> xs,
                                         const SoupConfig& cfg, const CalibrationTable& calib) {
  cfg.validate();
  const auto queries = embed_examples(encoder, xs);
  std::vector<ClassifyResult> results(xs.size());
  parallel_for(xs.size(), cfg.jobs, [&](std::size_t i) {
    results[i] = classify_impl(scorer, pool, pool.self_predictions(), task, xs[i], queries[i], cfg, cfg.weighting,
                               1, calib);
  });
  return results;
}

Prediction prompt_only(const Scorer& scorer, const TaskConfig& task, const Example& x,
                       const CalibrationTable& calib, std::optional<std::size_t> budget) {
  auto q = zero_shot_distribution(scorer, task, render_pattern(task, x), calib, budget);
  const LabelId label = q.argmax();
  return {std::move(q), label};
}

UnlabeledPool iterative_soup(const Scorer& scorer, const UnlabeledPool& pool, const TaskConfig& task,
                             const SoupConfig& cfg, const CalibrationTable& calib,
                             const IterationObserver& observer) {
  cfg.validate();
  UnlabeledPool current = pool;
  const auto examples = pool.examples();

  for (std::size_t iteration = 1; iteration <= cfg.iterations; ++iteration) {
    const SelfPredictions& snapshot = current.self_predictions();
    std::vector<std::optional<SelfPrediction>> refreshed(examples.size());

    parallel_for(examples.size(), cfg.jobs, [&](std::size_t i) {
      const Example& x = examples[i];
      if (current.size() < 2) return;
      const auto stored = current.index().vector(*current.index().find(x.id));
      const std::vector<double> query(stored.begin(), stored.end());
      auto result = classify_impl(scorer, current, snapshot, task, x, query, cfg, WeightingKind::kUniform, 1, calib);
      refreshed[i] = SelfPrediction{std::move(result.prediction.distribution), result.prediction.label};
    });

    SelfPredictions next = snapshot;
    std::size_t changed = 0;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      if (!refreshed[i]) continue;
      auto& slot = next.at(examples[i].id);
      if (slot.label != refreshed[i]->label) ++changed;
      slot = std::move(*refreshed[i]);
    }
    current = current.with_predictions(std::move(next));
    if (observer) observer(iteration, changed);
  }
  return current;
}

}  // namespace soup
