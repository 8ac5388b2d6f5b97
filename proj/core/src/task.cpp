// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0

#include "soup/task.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "soup/error.hpp"

namespace soup {

LabelDistribution::LabelDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw DomainError("label distribution is empty");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("label probability outside [0,1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    std::ostringstream msg;
    msg << "label distribution sums to " << sum;
    throw DomainError(msg.str());
  }
}

LabelDistribution LabelDistribution::uniform(std::size_t num_labels) {
  if (num_labels == 0) throw DomainError("uniform distribution over zero labels");
  return LabelDistribution(std::vector<double>(num_labels, 1.0 / static_cast<double>(num_labels)));
}

LabelId LabelDistribution::argmax() const {
  if (probs_.empty()) throw DomainError("argmax of empty distribution");
  LabelId best = 0;
  for (LabelId y = 1; y < probs_.size(); ++y) {
    if (probs_[y] > probs_[best]) best = y;
  }
  return best;
}

namespace {

bool is_single_token(std::string_view token) {
  return !token.empty() &&
         std::none_of(token.begin(), token.end(), [](unsigned char c) { return std::isspace(c); });
}

std::vector<TaskConfig::Segment> parse_pattern(std::string_view pattern) {
  using Kind = TaskConfig::Segment::Kind;
  struct Placeholder {
    std::string_view spelling;
    Kind kind;
  };
  constexpr Placeholder placeholders[] = {
      {"{text_pair}", Kind::kTextPair},
      {"{text}", Kind::kText},
      {kMaskPlaceholder, Kind::kMask},
  };

  std::vector<TaskConfig::Segment> segments;
  std::string literal;
  std::size_t pos = 0;
  while (pos < pattern.size()) {
    const Placeholder* hit = nullptr;
    for (const auto& p : placeholders) {
      if (pattern.substr(pos, p.spelling.size()) == p.spelling) {
        hit = &p;
        break;
      }
    }
    if (hit == nullptr) {
      literal.push_back(pattern[pos++]);
      continue;
    }
    if (!literal.empty()) {
      segments.push_back({Kind::kLiteral, std::move(literal)});
      literal.clear();
    }
    segments.push_back({hit->kind, {}});
    pos += hit->spelling.size();
  }
  if (!literal.empty()) segments.push_back({Kind::kLiteral, std::move(literal)});
  return segments;
}

bool ends_sentence(std::string_view s) {
  if (s.empty()) return false;
  const char c = s.back();
  return c == '.' || c == '!' || c == '?';
}

std::string_view rtrim_spaces(std::string_view s) {
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

// Collapses runs of spaces to one and trims both ends.
std::string normalize_spaces(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == ' ' && (out.empty() || out.back() == ' ')) continue;
    out.push_back(c);
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::string render(const TaskConfig& task, std::string_view text, std::string_view text_pair,
                   std::string_view mask_fill) {
  using Kind = TaskConfig::Segment::Kind;
  std::string out;
  bool after_slot = false;
  for (const auto& seg : task.segments()) {
    switch (seg.kind) {
      case Kind::kText:
        out.append(text);
        after_slot = true;
        break;
      case Kind::kTextPair:
        out.append(text_pair);
        after_slot = true;
        break;
      case Kind::kMask:
        out.append(mask_fill);
        after_slot = false;
        break;
      case Kind::kLiteral: {
        std::string_view lit = seg.literal;
        if (after_slot && lit.front() == '.') {
          // An empty slot or a value that already ends a sentence absorbs the
          // template's period; otherwise the period attaches to the value.
          const std::string_view trimmed = rtrim_spaces(out);
          if (trimmed.empty() || ends_sentence(trimmed)) {
            lit.remove_prefix(1);
          } else {
            out.resize(trimmed.size());
          }
        }
        out.append(lit);
        after_slot = false;
        break;
      }
    }
  }
  return normalize_spaces(out);
}

void check_arity(const TaskConfig& task, const Example& x) {
  if (x.arity() != task.arity()) {
    throw ConfigError("example '" + x.id + "' has " + std::to_string(x.arity()) + " input field(s), task '" +
                      task.name() + "' expects " + std::to_string(task.arity()));
  }
}

}  // namespace

TaskConfig TaskConfig::create(std::string name, std::vector<Label> labels, std::string_view pattern) {
  if (name.empty()) throw ConfigError("task name is empty");
  if (labels.size() < 2) throw ConfigError("task '" + name + "' needs at least two labels");

  std::set<std::string_view> tokens;
  std::set<std::string_view> names;
  for (const auto& label : labels) {
    if (!is_single_token(label.token)) {
      throw ConfigError("verbalization '" + label.token + "' is not a single token");
    }
    if (!tokens.insert(label.token).second) {
      throw ConfigError("verbalizer is not injective: '" + label.token + "' used twice");
    }
    if (!names.insert(label.name).second) throw ConfigError("duplicate label name '" + label.name + "'");
  }

  auto segments = parse_pattern(pattern);
  using Kind = Segment::Kind;
  auto count = [&](Kind k) {
    return std::count_if(segments.begin(), segments.end(), [k](const Segment& s) { return s.kind == k; });
  };
  if (count(Kind::kMask) != 1) throw ConfigError("pattern must contain exactly one [MASK]: " + std::string(pattern));
  if (count(Kind::kText) != 1) throw ConfigError("pattern must contain exactly one {text}: " + std::string(pattern));
  if (count(Kind::kTextPair) > 1) throw ConfigError("pattern has more than one {text_pair}");

  TaskConfig task;
  task.arity_ = count(Kind::kTextPair) == 1 ? 2 : 1;
  task.name_ = std::move(name);
  task.pattern_ = std::string(pattern);
  task.labels_ = std::move(labels);
  task.segments_ = std::move(segments);
  return task;
}

TaskConfig TaskConfig::from_json_text(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
    const auto& verbalizer = doc.at("verbalizer");
    std::vector<Label> labels;
    for (const auto& label_name : doc.at("labels")) {
      const auto name = label_name.get<std::string>();
      if (!verbalizer.contains(name)) throw ConfigError("verbalizer has no entry for label '" + name + "'");
      labels.push_back({name, verbalizer.at(name).get<std::string>()});
    }
    if (verbalizer.size() != labels.size()) throw ConfigError("verbalizer names labels that are not declared");
    return create(doc.at("name").get<std::string>(), std::move(labels), doc.at("pattern").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("task config: ") + e.what());
  }
}

TaskConfig TaskConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read task config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

const std::string& TaskConfig::label_name(LabelId y) const {
  if (y >= labels_.size()) throw ConfigError("unknown label id " + std::to_string(y) + " for task " + name_);
  return labels_[y].name;
}

const std::string& TaskConfig::verbalizer(LabelId y) const {
  if (y >= labels_.size()) throw ConfigError("unknown label id " + std::to_string(y) + " for task " + name_);
  return labels_[y].token;
}

std::optional<LabelId> TaskConfig::label_for_token(std::string_view token) const {
  for (LabelId y = 0; y < labels_.size(); ++y) {
    if (labels_[y].token == token) return y;
  }
  return std::nullopt;
}

std::optional<LabelId> TaskConfig::label_for_name(std::string_view name) const {
  for (LabelId y = 0; y < labels_.size(); ++y) {
    if (labels_[y].name == name) return y;
  }
  return std::nullopt;
}

std::vector<std::string> TaskConfig::candidates() const {
  std::vector<std::string> out;
  out.reserve(labels_.size());
  for (const auto& label : labels_) out.push_back(label.token);
  return out;
}

std::string render_pattern(const TaskConfig& task, const Example& x) {
  check_arity(task, x);
  return render(task, x.text, x.text_pair.value_or(""), kMaskPlaceholder);
}

std::string render_filled_pattern(const TaskConfig& task, const Example& x, LabelId y) {
  check_arity(task, x);
  return render(task, x.text, x.text_pair.value_or(""), task.verbalizer(y));
}

std::string render_calibration_input(const TaskConfig& task) {
  return render(task, "", "", kMaskPlaceholder);
}

std::span<const TaskConfig> builtin_tasks() {
  static const std::vector<TaskConfig> tasks = [] {
    std::vector<TaskConfig> t;
    t.push_back(TaskConfig::create("imdb", {{"negative", "bad"}, {"positive", "good"}},
                                   "{text}. The movie is [MASK]."));
    t.push_back(TaskConfig::create("yelp",
                                   {{"1 star", "terrible"},
                                    {"2 stars", "bad"},
                                    {"3 stars", "okay"},
                                    {"4 stars", "good"},
                                    {"5 stars", "great"}},
                                   "{text}. In summary, the restaurant is [MASK]."));
    t.push_back(TaskConfig::create(
        "agnews",
        {{"World", "World"}, {"Sports", "Sports"}, {"Business", "Business"}, {"Science/Tech", "Science"}},
        "{text}. News Category: [MASK]."));
    t.push_back(TaskConfig::create("yahoo",
                                   {{"Society & Culture", "Society"},
                                    {"Science & Mathematics", "Science"},
                                    {"Health", "Health"},
                                    {"Education & Reference", "Education"},
                                    {"Computers & Internet", "Computer"},
                                    {"Sports", "Sports"},
                                    {"Business & Finance", "Business"},
                                    {"Entertainment & Music", "Entertainment"},
                                    {"Family & Relationships", "Relationship"},
                                    {"Politics & Government", "Politics"}},
                                   "{text} {text_pair}. Question Category: [MASK]."));
    return t;
  }();
  return tasks;
}

std::optional<TaskConfig> find_builtin_task(std::string_view name) {
  for (const auto& task : builtin_tasks()) {
    if (task.name() == name) return task;
  }
  return std::nullopt;
}

TaskConfig resolve_task(std::string_view name_or_path) {
  if (auto task = find_builtin_task(name_or_path)) return *task;
  const std::filesystem::path path{std::string(name_or_path)};
  if (std::filesystem::exists(path)) return TaskConfig::load(path);
  throw ConfigError("unknown task '" + std::string(name_or_path) + "' (not a built-in name or a readable file)");
}

}  // namespace soup
