// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "soup/task.hpp"

namespace soup {

struct Dataset {
  std::string task_name;
  std::vector<Example> examples;

  std::size_t size() const noexcept { return examples.size(); }
  bool has_gold_labels() const;
};

/// One JSON object per line: {"id"?: str, "text": str, "text_pair"?: str,
/// "label"?: int}. Missing ids become "line-<n>" (1-based). Blank lines are
/// skipped. Throws ParseError for malformed lines and ValidationError for
/// out-of-range labels, arity mismatches and duplicate ids.
Dataset load_jsonl(const std::filesystem::path& path, const TaskConfig& task);
Dataset parse_jsonl(std::istream& in, const TaskConfig& task);

/// Seeded uniform sample of `cap` examples without replacement, keeping the
/// original relative order. Identity when the dataset already fits.
Dataset subsample(const Dataset& ds, std::size_t cap, std::uint64_t seed);

/// Fraction of examples whose prediction equals the gold label. Throws
/// EvaluationError if an example lacks a prediction or a gold label.
double accuracy(const std::map<std::string, LabelId>& predictions, const Dataset& ds);

}  // namespace soup
