// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic, model-free scorer and encoder. Used by the test suites and
// by `soup --mock-scorer` for offline runs.

#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "soup/scorer.hpp"

namespace soup::mock {

/// Whitespace tokenization: returns at most `budget` tokens of `text` joined
/// by single spaces. `keep_tail` keeps the last tokens instead of the first.
/// Text within budget is returned unchanged.
std::string truncate_tokens(std::string_view text, std::size_t budget, bool keep_tail);

/// Applies per-part truncation and joins the parts with one space. Parts
/// holding the mask are cut from the front so the mask survives. Throws
/// ProtocolError unless the result has exactly one mask.
std::string join_context(const ScoreRequest& request);

/// Raw model scores keyed by exact joined context, then candidate token.
using ScoreTable = std::map<std::string, std::map<std::string, double>, std::less<>>;

/// Table-driven masked LM. Contexts or candidates absent from the table
/// score 1/|candidates|. Entries are raw scores and need not sum to one.
class MockScorer final : public Scorer {
 public:
  explicit MockScorer(ScoreTable table = {}, std::string name = "mock");

  ScoreResponse score_mask(const ScoreRequest& request) const override;
  std::string identity() const override { return name_; }

  void set(const std::string& context, const std::string& candidate, double score);
  const ScoreTable& table() const noexcept { return table_; }

  /// Number of score_mask calls served so far.
  std::size_t request_count() const noexcept { return requests_.load(); }
  /// Joined contexts of every call, in arrival order.
  std::vector<std::string> context_log() const;
  void clear_log();

 private:
  ScoreTable table_;
  std::string name_;
  mutable std::atomic<std::size_t> requests_{0};
  mutable std::mutex log_mu_;
  mutable std::vector<std::string> log_;
};

/// Hashes each text to a pseudo-random unit vector of dimension `dim`.
/// Identical texts map to identical vectors in every process.
class HashEncoder final : public Encoder {
 public:
  explicit HashEncoder(std::size_t dim = 8);

  std::vector<std::vector<double>> embed(std::span<const std::string> texts) const override;
  std::size_t dim() const noexcept { return dim_; }

 private:
  std::size_t dim_;
};

/// Fixed vectors for known texts; everything else falls back to HashEncoder.
class TableEncoder final : public Encoder {
 public:
  explicit TableEncoder(std::size_t dim, std::map<std::string, std::vector<double>, std::less<>> vectors = {});

  std::vector<std::vector<double>> embed(std::span<const std::string> texts) const override;
  void set(const std::string& text, std::vector<double> vector);
  std::size_t dim() const noexcept { return fallback_.dim(); }

 private:
  HashEncoder fallback_;
  std::map<std::string, std::vector<double>, std::less<>> vectors_;
};

/// Scorer + encoder pair described by one JSON file:
///   {"name": str?, "dim": int?, "scores": {context: {candidate: p}},
///    "embeddings": {text: [float, ...]}?}
struct MockBackend {
  std::shared_ptr<MockScorer> scorer;
  std::shared_ptr<TableEncoder> encoder;
};

MockBackend load_backend(const std::filesystem::path& path);
MockBackend backend_from_json_text(std::string_view json_text);

}  // namespace soup::mock
