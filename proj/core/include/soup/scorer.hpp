// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0
//
// Masked-LM scoring and sentence-encoder contracts, plus the calibrated
// zero-shot label distribution built on top of them.

#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "soup/task.hpp"

namespace soup {

/// Probabilities below this are raised to it before any division.
inline constexpr double kScoreFloor = 1e-12;

/// One piece of a scoring context. The scorer truncates `text` to at most
/// `truncate_to` tokens of its own tokenizer before joining.
struct ContextPart {
  std::string text;
  std::optional<std::size_t> truncate_to;

  friend bool operator==(const ContextPart&, const ContextPart&) = default;
};

/// Parts are joined with a single space after truncation; the joined text
/// must contain exactly one mask placeholder.
struct ScoreRequest {
  std::vector<ContextPart> parts;
  std::vector<std::string> candidates;

  friend bool operator==(const ScoreRequest&, const ScoreRequest&) = default;
};

struct ScoreResponse {
  std::map<std::string, double> scores;
};

/// Masked language model M: probability of each candidate token at the
/// masked position. Implementations must be safe to call concurrently.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual ScoreResponse score_mask(const ScoreRequest& request) const = 0;

  /// Stable name of the underlying model; part of the calibration cache key.
  virtual std::string identity() const = 0;
};

/// Sentence encoder E. Implementations must be safe to call concurrently.
class Encoder {
 public:
  virtual ~Encoder() = default;

  virtual std::vector<std::vector<double>> embed(std::span<const std::string> texts) const = 0;
};

/// Checks the client-side request invariants: non-empty single-token
/// candidates and at least one part. Throws ProtocolError.
void validate_request(const ScoreRequest& request);

/// Counts non-overlapping occurrences of the mask placeholder.
std::size_t count_masks(std::string_view text);

/// Scores `request` and verifies the response covers every candidate with a
/// probability in [0,1]. Throws ProtocolError on a malformed response.
ScoreResponse score_mask(const Scorer& scorer, const ScoreRequest& request);

/// Embeds `texts` and verifies one vector per text with a uniform dimension.
std::vector<std::vector<double>> embed(const Encoder& encoder, std::span<const std::string> texts);

/// M(v(y) | P(epsilon)) for each label, indexed by label id.
struct CalibrationTable {
  std::vector<double> probs;
};

/// Scores the calibration input once, uncached.
CalibrationTable calibrate(const Scorer& scorer, const TaskConfig& task);

/// Write-once calibration tables keyed by (task name, scorer identity).
class CalibrationCache {
 public:
  const CalibrationTable& get(const Scorer& scorer, const TaskConfig& task);

  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::pair<std::string, std::string>, std::unique_ptr<CalibrationTable>> tables_;
};

/// Calibrated normalization of raw candidate scores:
/// p(y) proportional to raw(v(y)) / calib(y), both floored at kScoreFloor.
LabelDistribution normalize_calibrated(const TaskConfig& task, const ScoreResponse& raw,
                                       const CalibrationTable& calib);

/// Scores `request` and returns its calibrated label distribution.
LabelDistribution zero_shot_distribution(const Scorer& scorer, const TaskConfig& task,
                                         const ScoreRequest& request, const CalibrationTable& calib);

/// Single-part convenience overload for an already rendered masked pattern.
LabelDistribution zero_shot_distribution(const Scorer& scorer, const TaskConfig& task, std::string_view masked,
                                         const CalibrationTable& calib,
                                         std::optional<std::size_t> budget = std::nullopt);

}  // namespace soup
