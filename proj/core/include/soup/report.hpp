// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0
//
// JSON documents written by the command-line tool: run reports, evaluation
// reports and the self-prediction sidecar of a precomputed pool.

#pragma once

#include <filesystem>
#include <optional>
#include <span>

#include <nlohmann/json.hpp>

#include "soup/pipeline.hpp"

namespace soup::report {

nlohmann::json config_json(const SoupConfig& cfg);

/// {id, label, label_name, distribution, neighbors: [{id, similarity}]}
nlohmann::json prediction_json(const TaskConfig& task, const Example& x, const ClassifyResult& result);

/// Config echo, seed, per-example predictions, and accuracy when given.
nlohmann::json run_report(const TaskConfig& task, const SoupConfig& cfg, std::span<const Example> xs,
                          std::span<const ClassifyResult> results, std::optional<double> accuracy);

/// {"task", "n", "accuracy", "config", "seed"}.
nlohmann::json eval_report(const TaskConfig& task, const SoupConfig& cfg, std::size_t n, double accuracy);

/// {id: {"distribution": [...], "label": int}}
nlohmann::json sidecar_json(const SelfPredictions& predictions);
/// Throws FormatError on schema violations or labels outside the task.
SelfPredictions sidecar_from_json(const nlohmann::json& j, const TaskConfig& task);

/// Pretty-printed JSON followed by a newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace soup::report
