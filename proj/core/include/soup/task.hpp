// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0
//
// Classification tasks: label sets, cloze patterns and verbalizers.

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace soup {

using LabelId = std::size_t;

inline constexpr std::string_view kMaskPlaceholder = "[MASK]";

/// One input to classify. `text_pair` is only set for two-field tasks.
struct Example {
  std::string id;
  std::string text;
  std::optional<std::string> text_pair;
  std::optional<LabelId> gold_label;

  std::size_t arity() const noexcept { return text_pair ? 2 : 1; }
};

/// Probability vector over the labels of one task.
class LabelDistribution {
 public:
  static constexpr double kSumTolerance = 1e-9;

  LabelDistribution() = default;
  /// Throws DomainError unless every entry lies in [0,1] and the entries sum
  /// to one within kSumTolerance.
  explicit LabelDistribution(std::vector<double> probs);

  /// Uniform distribution over `num_labels` labels.
  static LabelDistribution uniform(std::size_t num_labels);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](LabelId y) const { return probs_[y]; }
  std::span<const double> probs() const noexcept { return probs_; }

  /// Most probable label; ties go to the lowest label id.
  LabelId argmax() const;

  friend bool operator==(const LabelDistribution&, const LabelDistribution&) = default;

 private:
  std::vector<double> probs_;
};

/// Pattern, verbalizer and label set for one classification task. Immutable
/// once constructed; `create` validates every invariant.
class TaskConfig {
 public:
  struct Label {
    std::string name;
    std::string token;
  };

  /// `pattern` uses `{text}`, optionally `{text_pair}`, and exactly one
  /// `[MASK]`. `labels` are given in label-id order.
  static TaskConfig create(std::string name, std::vector<Label> labels, std::string_view pattern);

  /// Loads a JSON task file with keys `name`, `labels`, `pattern` and
  /// `verbalizer` (label name -> token).
  static TaskConfig load(const std::filesystem::path& path);
  static TaskConfig from_json_text(std::string_view json_text);

  const std::string& name() const noexcept { return name_; }
  const std::string& pattern() const noexcept { return pattern_; }
  std::size_t num_labels() const noexcept { return labels_.size(); }
  std::size_t arity() const noexcept { return arity_; }

  const std::string& label_name(LabelId y) const;
  /// Throws ConfigError for an unknown label.
  const std::string& verbalizer(LabelId y) const;
  /// Inverse verbalizer; nullopt for tokens that name no label.
  std::optional<LabelId> label_for_token(std::string_view token) const;
  std::optional<LabelId> label_for_name(std::string_view name) const;

  /// Verbalizer tokens in label-id order.
  std::vector<std::string> candidates() const;

  struct Segment {
    enum class Kind { kLiteral, kText, kTextPair, kMask };
    Kind kind;
    std::string literal;
  };
  std::span<const Segment> segments() const noexcept { return segments_; }

 private:
  TaskConfig() = default;

  std::string name_;
  std::string pattern_;
  std::vector<Label> labels_;
  std::vector<Segment> segments_;
  std::size_t arity_ = 1;
};

/// P(x): the pattern with input slots filled and the mask left in place.
/// Throws ConfigError when the example's arity does not match the task.
std::string render_pattern(const TaskConfig& task, const Example& x);

/// P(x) with the mask replaced by the verbalization of `y`.
std::string render_filled_pattern(const TaskConfig& task, const Example& x, LabelId y);

/// P(epsilon): every input slot empty.
std::string render_calibration_input(const TaskConfig& task);

/// IMDb, Yelp, AG's News and Yahoo Questions.
std::span<const TaskConfig> builtin_tasks();

/// Built-in task by name ("imdb", "yelp", "agnews", "yahoo"); nullopt if
/// unknown.
std::optional<TaskConfig> find_builtin_task(std::string_view name);

/// Built-in name or path to a task file.
TaskConfig resolve_task(std::string_view name_or_path);

}  // namespace soup
