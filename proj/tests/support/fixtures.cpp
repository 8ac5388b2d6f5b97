// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"

#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

namespace soup::testing {

using nlohmann::json;

namespace {

Example ex(std::string id, std::string text, std::optional<LabelId> gold = std::nullopt) {
  return Example{std::move(id), std::move(text), std::nullopt, gold};
}

Scenario finish(TaskConfig task, json doc, Dataset pool, Dataset test) {
  std::string text = doc.dump();
  auto backend = mock::backend_from_json_text(text);
  return Scenario{std::move(task), std::move(backend), std::move(pool), std::move(test), std::move(text)};
}

}  // namespace

Scenario movie_walkthrough() {
  auto task = *find_builtin_task("imdb");
  json doc;
  doc["name"] = "mock-walkthrough";
  doc["dim"] = 4;
  auto& s = doc["scores"];
  s["The movie is [MASK]."] = {{"good", 0.2}, {"bad", 0.2}};
  s["Not worth the time! The movie is [MASK]."] = {{"good", 0.06}, {"bad", 0.14}};
  s["Do not watch this movie. The movie is [MASK]."] = {{"good", 0.05}, {"bad", 0.15}};
  s["A wonderful, moving film. The movie is [MASK]."] = {{"good", 0.16}, {"bad", 0.04}};
  s["Not worth watching. The movie is [MASK]."] = {{"good", 0.09}, {"bad", 0.11}};
  s["Not worth the time! The movie is bad. Not worth watching. The movie is [MASK]."] = {{"good", 0.1},
                                                                                        {"bad", 0.9}};
  s["Do not watch this movie. The movie is bad. Not worth watching. The movie is [MASK]."] = {{"good", 0.3},
                                                                                              {"bad", 0.7}};
  auto& e = doc["embeddings"];
  e["Not worth watching."] = {1.0, 0.0, 0.0, 0.0};
  e["Not worth the time!"] = {0.96, 0.28, 0.0, 0.0};
  e["Do not watch this movie."] = {0.8, 0.0, 0.6, 0.0};
  e["A wonderful, moving film."] = {-0.6, 0.0, 0.0, 0.8};

  Dataset pool{"imdb",
               {ex("n1", "Not worth the time!", 0), ex("n2", "Do not watch this movie.", 0),
                ex("n3", "A wonderful, moving film.", 1)}};
  Dataset test{"imdb", {ex("x", "Not worth watching.", 0)}};
  return finish(std::move(task), std::move(doc), std::move(pool), std::move(test));
}

Scenario two_example_iteration() {
  auto task = *find_builtin_task("imdb");
  json doc;
  doc["name"] = "mock-two-example";
  doc["dim"] = 2;
  auto& s = doc["scores"];
  s["The movie is [MASK]."] = {{"bad", 0.5}, {"good", 0.5}};
  s["Good stuff. The movie is [MASK]."] = {{"bad", 0.25}, {"good", 0.75}};
  s["Bad stuff. The movie is [MASK]."] = {{"bad", 0.375}, {"good", 0.625}};
  s["Bad stuff. The movie is good. Good stuff. The movie is [MASK]."] = {{"bad", 0.25}, {"good", 0.75}};
  s["Good stuff. The movie is good. Bad stuff. The movie is [MASK]."] = {{"bad", 0.625}, {"good", 0.375}};
  s["Bad stuff. The movie is bad. Good stuff. The movie is [MASK]."] = {{"bad", 0.125}, {"good", 0.875}};
  s["Good stuff. The movie is bad. Bad stuff. The movie is [MASK]."] = {{"bad", 0.875}, {"good", 0.125}};
  doc["embeddings"]["Good stuff."] = {1.0, 0.0};
  doc["embeddings"]["Bad stuff."] = {0.6, 0.8};

  Dataset pool{"imdb", {ex("u1", "Good stuff.", 1), ex("u2", "Bad stuff.", 0)}};
  return finish(std::move(task), std::move(doc), std::move(pool), Dataset{"imdb", {}});
}

Scenario synthetic_gain(std::size_t n_test, std::size_t n_pool, std::uint64_t seed) {
  auto task = *find_builtin_task("imdb");
  constexpr std::size_t kDim = 16;
  constexpr double kNoise = 0.15;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, kNoise);
  std::bernoulli_distribution mislabel(0.1);

  auto embedding = [&](LabelId cls) {
    std::vector<double> v(kDim);
    for (double& x : v) x = noise(rng);
    v[cls] += 1.0;
    return v;
  };

  json doc;
  doc["name"] = "mock-synthetic";
  doc["dim"] = kDim;
  auto& s = doc["scores"];
  auto& e = doc["embeddings"];
  s["The movie is [MASK]."] = {{"bad", 0.5}, {"good", 0.5}};

  Dataset pool{"imdb", {}};
  std::vector<LabelId> self_label;
  for (std::size_t i = 0; i < n_pool; ++i) {
    const LabelId cls = i % 2;
    auto x = ex("p" + std::to_string(i), "p" + std::to_string(i) + " easy.", cls);
    const LabelId shown = mislabel(rng) ? 1 - cls : cls;
    self_label.push_back(shown);
    const std::string bare = render_pattern(task, x);
    s[bare] = {{task.verbalizer(shown), 0.8}, {task.verbalizer(1 - shown), 0.2}};
    e[x.text] = embedding(cls);
    pool.examples.push_back(std::move(x));
  }

  Dataset test{"imdb", {}};
  for (std::size_t j = 0; j < n_test; ++j) {
    const LabelId cls = j % 2;
    auto x = ex("t" + std::to_string(j), "t" + std::to_string(j) + " a long review with mixed signals", cls);
    e[x.text] = embedding(cls);
    const std::string masked = render_pattern(task, x);
    for (std::size_t i = 0; i < n_pool; ++i) {
      const LabelId demo = self_label[i];
      const std::string context = render_filled_pattern(task, pool.examples[i], demo) + " " + masked;
      s[context] = {{task.verbalizer(demo), 0.75}, {task.verbalizer(1 - demo), 0.25}};
    }
    test.examples.push_back(std::move(x));
  }
  return finish(std::move(task), std::move(doc), std::move(pool), std::move(test));
}

mock::MockBackend reload(const Scenario& s) { return mock::backend_from_json_text(s.backend_json); }

void write_jsonl(const std::filesystem::path& path, const Dataset& ds) {
  std::ofstream out(path);
  for (const auto& x : ds.examples) {
    json line = {{"id", x.id}, {"text", x.text}};
    if (x.text_pair) line["text_pair"] = *x.text_pair;
    if (x.gold_label) line["label"] = *x.gold_label;
    out << line.dump() << '\n';
  }
}

TempDir::TempDir() {
  std::random_device rd;
  const auto base = std::filesystem::temp_directory_path();
  do {
    path_ = base / ("soup-test-" + std::to_string(rd()) + std::to_string(rd()));
  } while (std::filesystem::exists(path_));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace soup::testing
