// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0

#include "soup/scorer.hpp"

#include <algorithm>
#include <cctype>

#include "soup/error.hpp"

namespace soup {

std::size_t count_masks(std::string_view text) {
  std::size_t n = 0;
  for (auto pos = text.find(kMaskPlaceholder); pos != std::string_view::npos;
       pos = text.find(kMaskPlaceholder, pos + kMaskPlaceholder.size())) {
    ++n;
  }
  return n;
}

void validate_request(const ScoreRequest& request) {
  if (request.parts.empty()) throw ProtocolError("score request has no context parts");
  if (request.candidates.empty()) throw ProtocolError("score request has no candidates");
  for (const auto& c : request.candidates) {
    const bool single = !c.empty() && std::none_of(c.begin(), c.end(), [](unsigned char ch) {
      return std::isspace(ch);
    });
    if (!single) throw ProtocolError("candidate '" + c + "' is not a single token");
  }
}

ScoreResponse score_mask(const Scorer& scorer, const ScoreRequest& request) {
  validate_request(request);
  ScoreResponse response = scorer.score_mask(request);
  for (const auto& c : request.candidates) {
    auto it = response.scores.find(c);
    if (it == response.scores.end()) throw ProtocolError("scorer response is missing candidate '" + c + "'");
    if (!(it->second >= 0.0 && it->second <= 1.0)) {
      throw ProtocolError("scorer returned a probability outside [0,1] for '" + c + "'");
    }
  }
  return response;
}

std::vector<std::vector<double>> embed(const Encoder& encoder, std::span<const std::string> texts) {
  if (texts.empty()) throw DomainError("embed called with no texts");
  auto vectors = encoder.embed(texts);
  if (vectors.size() != texts.size()) {
    throw ProtocolError("encoder returned " + std::to_string(vectors.size()) + " vectors for " +
                        std::to_string(texts.size()) + " texts");
  }
  const std::size_t dim = vectors.front().size();
  if (dim == 0) throw ProtocolError("encoder returned zero-dimensional vectors");
  for (const auto& v : vectors) {
    if (v.size() != dim) throw ProtocolError("encoder returned vectors of mixed dimension");
  }
  return vectors;
}

CalibrationTable calibrate(const Scorer& scorer, const TaskConfig& task) {
  ScoreRequest request{{{render_calibration_input(task), std::nullopt}}, task.candidates()};
  const ScoreResponse response = score_mask(scorer, request);
  CalibrationTable table;
  table.probs.reserve(task.num_labels());
  for (const auto& token : request.candidates) {
    table.probs.push_back(std::max(response.scores.at(token), kScoreFloor));
  }
  return table;
}

const CalibrationTable& CalibrationCache::get(const Scorer& scorer, const TaskConfig& task) {
  auto key = std::make_pair(task.name(), scorer.identity());
  std::lock_guard lock(mu_);
  auto it = tables_.find(key);
  if (it == tables_.end()) {
    it = tables_.emplace(std::move(key), std::make_unique<CalibrationTable>(calibrate(scorer, task))).first;
  }
  return *it->second;
}

std::size_t CalibrationCache::size() const {
  std::lock_guard lock(mu_);
  return tables_.size();
}

LabelDistribution normalize_calibrated(const TaskConfig& task, const ScoreResponse& raw,
                                       const CalibrationTable& calib) {
  const std::size_t n = task.num_labels();
  if (calib.probs.size() != n) {
    throw DomainError("calibration table has " + std::to_string(calib.probs.size()) + " entries, task has " +
                      std::to_string(n) + " labels");
  }
  std::vector<double> ratios(n);
  double total = 0.0;
  for (LabelId y = 0; y < n; ++y) {
    auto it = raw.scores.find(task.verbalizer(y));
    if (it == raw.scores.end()) throw ProtocolError("missing score for '" + task.verbalizer(y) + "'");
    ratios[y] = std::max(it->second, kScoreFloor) / std::max(calib.probs[y], kScoreFloor);
    total += ratios[y];
  }
  for (double& r : ratios) r /= total;
  return LabelDistribution(std::move(ratios));
}

LabelDistribution zero_shot_distribution(const Scorer& scorer, const TaskConfig& task,
                                         const ScoreRequest& request, const CalibrationTable& calib) {
  return normalize_calibrated(task, score_mask(scorer, request), calib);
}

LabelDistribution zero_shot_distribution(const Scorer& scorer, const TaskConfig& task, std::string_view masked,
                                         const CalibrationTable& calib, std::optional<std::size_t> budget) {
  ScoreRequest request{{{std::string(masked), budget}}, task.candidates()};
  return zero_shot_distribution(scorer, task, request, calib);
}

}  // namespace soup
