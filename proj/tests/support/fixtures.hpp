// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared mock-scorer fixtures for unit, acceptance and CLI tests.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "soup/dataset.hpp"
#include "soup/mock.hpp"
#include "soup/task.hpp"

namespace soup::testing {

/// A task, its pool, a set of inputs and a mock backend scripted for them.
struct Scenario {
  TaskConfig task;
  mock::MockBackend backend;
  Dataset pool;
  Dataset test;
  /// Same backend as a JSON document accepted by --mock-scorer.
  std::string backend_json;
};

/// Movie-review walk-through: x = "Not worth watching." with three pool
/// reviews. The two nearest are self-labeled bad (0.3/0.7 and 0.25/0.75);
/// their primed contexts yield (good 0.1, bad 0.9) and (good 0.3, bad 0.7).
Scenario movie_walkthrough();

/// Two pool reviews, k = 1, with dyadic scores so every distribution is
/// exact. Initial labels: u1 good (0.25, 0.75), u2 good (0.375, 0.625).
/// Iteration 1: u1 (0.25, 0.75) good, u2 (0.625, 0.375) bad.
/// Iteration 2: u1 (0.125, 0.875) good, u2 (0.625, 0.375) bad.
/// (Distributions listed as (bad, good), i.e. in label-id order.)
Scenario two_example_iteration();

/// Binary task with two embedding clusters. Pool texts are easy: the bare
/// prompt scores the true class 0.8 (10% of them are mislabeled). Test
/// prompts are absent from the table, hence at chance. Primed contexts
/// score the demonstration's label 0.75.
Scenario synthetic_gain(std::size_t n_test = 100, std::size_t n_pool = 200, std::uint64_t seed = 20260101);

/// Rebuilds a scenario's JSON backend (fresh request counters).
mock::MockBackend reload(const Scenario& s);

/// Writes JSONL lines for a dataset ({"id", "text", "text_pair"?, "label"?}).
void write_jsonl(const std::filesystem::path& path, const Dataset& ds);

/// Fresh, empty temporary directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace soup::testing
