// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0

#include "soup/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "soup/error.hpp"

namespace soup {

bool Dataset::has_gold_labels() const {
  return std::all_of(examples.begin(), examples.end(), [](const Example& e) { return e.gold_label.has_value(); });
}

Dataset parse_jsonl(std::istream& in, const TaskConfig& task) {
  Dataset ds{task.name(), {}};
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    Example ex;
    std::optional<std::int64_t> label;
    try {
      const auto obj = nlohmann::json::parse(line);
      if (!obj.is_object()) throw ParseError(line_no, "expected a JSON object");
      ex.id = obj.contains("id") ? obj.at("id").get<std::string>() : "line-" + std::to_string(line_no);
      ex.text = obj.at("text").get<std::string>();
      if (obj.contains("text_pair") && !obj.at("text_pair").is_null()) {
        ex.text_pair = obj.at("text_pair").get<std::string>();
      }
      if (obj.contains("label") && !obj.at("label").is_null()) label = obj.at("label").get<std::int64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, e.what());
    }

    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (label) {
      if (*label < 0 || static_cast<std::size_t>(*label) >= task.num_labels()) {
        throw ValidationError(where + "label " + std::to_string(*label) + " outside [0, " +
                              std::to_string(task.num_labels()) + ") for task " + task.name());
      }
      ex.gold_label = static_cast<LabelId>(*label);
    }
    if (ex.arity() != task.arity()) {
      throw ValidationError(where + "task " + task.name() + " expects " + std::to_string(task.arity()) +
                            " input field(s)");
    }
    if (!seen.insert(ex.id).second) throw ValidationError(where + "duplicate id '" + ex.id + "'");
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

Dataset load_jsonl(const std::filesystem::path& path, const TaskConfig& task) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read dataset " + path.string());
  return parse_jsonl(in, task);
}

Dataset subsample(const Dataset& ds, std::size_t cap, std::uint64_t seed) {
  if (cap == 0) throw ConfigError("subsample cap must be at least 1");
  if (ds.size() <= cap) return ds;
  Dataset out{ds.task_name, {}};
  out.examples.reserve(cap);
  std::mt19937_64 rng(seed);
  // Selection sampling over a forward range keeps the input order.
  std::sample(ds.examples.begin(), ds.examples.end(), std::back_inserter(out.examples), cap, rng);
  return out;
}

double accuracy(const std::map<std::string, LabelId>& predictions, const Dataset& ds) {
  if (ds.examples.empty()) throw EvaluationError("cannot compute accuracy of an empty dataset");
  std::size_t correct = 0;
  for (const auto& ex : ds.examples) {
    if (!ex.gold_label) throw EvaluationError("example '" + ex.id + "' has no gold label");
    auto it = predictions.find(ex.id);
    if (it == predictions.end()) throw EvaluationError("no prediction for example '" + ex.id + "'");
    if (it->second == *ex.gold_label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(ds.examples.size());
}

}  // namespace soup
