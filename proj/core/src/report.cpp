// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0

#include "soup/report.hpp"

#include <fstream>

#include "soup/error.hpp"

namespace soup::report {

using nlohmann::json;

json config_json(const SoupConfig& cfg) {
  return {
      {"task", cfg.task},
      {"k", cfg.k},
      {"strategy", to_string(cfg.strategy)},
      {"weighting", to_string(cfg.weighting)},
      {"iterations", cfg.iterations},
      {"budget", cfg.example_token_budget ? json(*cfg.example_token_budget) : json(nullptr)},
      {"pool_cap", cfg.pool_cap},
      {"test_cap", cfg.test_cap},
      {"seed", cfg.seed},
  };
}

json prediction_json(const TaskConfig& task, const Example& x, const ClassifyResult& result) {
  json neighbors = json::array();
  for (const auto& hit : result.neighbors) neighbors.push_back({{"id", hit.id}, {"similarity", hit.similarity}});
  const auto probs = result.prediction.distribution.probs();
  return {
      {"id", x.id},
      {"label", result.prediction.label},
      {"label_name", task.label_name(result.prediction.label)},
      {"distribution", std::vector<double>(probs.begin(), probs.end())},
      {"neighbors", std::move(neighbors)},
  };
}

json run_report(const TaskConfig& task, const SoupConfig& cfg, std::span<const Example> xs,
                std::span<const ClassifyResult> results, std::optional<double> accuracy) {
  json predictions = json::array();
  for (std::size_t i = 0; i < xs.size(); ++i) predictions.push_back(prediction_json(task, xs[i], results[i]));
  json doc = {
      {"task", task.name()},
      {"config", config_json(cfg)},
      {"seed", cfg.seed},
      {"n", xs.size()},
      {"predictions", std::move(predictions)},
  };
  if (accuracy) doc["accuracy"] = *accuracy;
  return doc;
}

json eval_report(const TaskConfig& task, const SoupConfig& cfg, std::size_t n, double accuracy) {
  return {{"task", task.name()}, {"n", n}, {"accuracy", accuracy}, {"config", config_json(cfg)}, {"seed", cfg.seed}};
}

json sidecar_json(const SelfPredictions& predictions) {
  json doc = json::object();
  for (const auto& [id, sp] : predictions) {
    const auto probs = sp.distribution.probs();
    doc[id] = {{"distribution", std::vector<double>(probs.begin(), probs.end())}, {"label", sp.label}};
  }
  return doc;
}

SelfPredictions sidecar_from_json(const json& j, const TaskConfig& task) {
  if (!j.is_object()) throw FormatError("self-prediction sidecar must be a JSON object");
  SelfPredictions out;
  try {
    for (const auto& [id, entry] : j.items()) {
      auto probs = entry.at("distribution").get<std::vector<double>>();
      if (probs.size() != task.num_labels()) {
        throw FormatError("sidecar entry '" + id + "' has " + std::to_string(probs.size()) + " probabilities");
      }
      const auto label = entry.at("label").get<std::size_t>();
      LabelDistribution dist(std::move(probs));
      if (label != dist.argmax()) throw FormatError("sidecar label of '" + id + "' is not its argmax");
      out.emplace(id, SelfPrediction{std::move(dist), label});
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("self-prediction sidecar: ") + e.what());
  } catch (const DomainError& e) {
    throw FormatError(std::string("self-prediction sidecar: ") + e.what());
  }
  return out;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out.flush()) throw IoError("failed writing " + path.string());
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace soup::report
