// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0

#include "soup/mock.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "soup/error.hpp"

namespace soup::mock {

namespace {

std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) tokens.push_back(text.substr(start, i - start));
  }
  return tokens;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::string truncate_tokens(std::string_view text, std::size_t budget, bool keep_tail) {
  const auto tokens = split_whitespace(text);
  if (tokens.size() <= budget) return std::string(text);
  const std::size_t first = keep_tail ? tokens.size() - budget : 0;
  std::string out;
  for (std::size_t i = first; i < first + budget; ++i) {
    if (!out.empty()) out.push_back(' ');
    out.append(tokens[i]);
  }
  return out;
}

std::string join_context(const ScoreRequest& request) {
  std::string joined;
  for (const auto& part : request.parts) {
    std::string text = part.text;
    if (part.truncate_to) text = truncate_tokens(text, *part.truncate_to, count_masks(text) > 0);
    if (!joined.empty()) joined.push_back(' ');
    joined.append(text);
  }
  const std::size_t masks = count_masks(joined);
  if (masks != 1) {
    throw ProtocolError("context must contain exactly one " + std::string(kMaskPlaceholder) + ", found " +
                        std::to_string(masks));
  }
  return joined;
}

MockScorer::MockScorer(ScoreTable table, std::string name) : table_(std::move(table)), name_(std::move(name)) {}

ScoreResponse MockScorer::score_mask(const ScoreRequest& request) const {
  validate_request(request);
  std::string context = join_context(request);
  ++requests_;

  const double fallback = 1.0 / static_cast<double>(request.candidates.size());
  ScoreResponse response;
  const auto row = table_.find(context);
  for (const auto& c : request.candidates) {
    double p = fallback;
    if (row != table_.end()) {
      if (auto it = row->second.find(c); it != row->second.end()) p = it->second;
    }
    response.scores[c] = p;
  }

  std::lock_guard lock(log_mu_);
  log_.push_back(std::move(context));
  return response;
}

void MockScorer::set(const std::string& context, const std::string& candidate, double score) {
  table_[context][candidate] = score;
}

std::vector<std::string> MockScorer::context_log() const {
  std::lock_guard lock(log_mu_);
  return log_;
}

void MockScorer::clear_log() {
  std::lock_guard lock(log_mu_);
  log_.clear();
}

HashEncoder::HashEncoder(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw ConfigError("encoder dimension must be positive");
}

std::vector<std::vector<double>> HashEncoder::embed(std::span<const std::string> texts) const {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    std::uint64_t state = fnv1a(text);
    std::vector<double> v(dim_);
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (double& x : v) {
        // 53 random bits mapped to [-1, 1).
        x = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;
        norm2 += x * x;
      }
    } while (norm2 == 0.0);
    const double norm = std::sqrt(norm2);
    for (double& x : v) x /= norm;
    out.push_back(std::move(v));
  }
  return out;
}

TableEncoder::TableEncoder(std::size_t dim, std::map<std::string, std::vector<double>, std::less<>> vectors)
    : fallback_(dim), vectors_(std::move(vectors)) {
  for (const auto& [text, v] : vectors_) {
    if (v.size() != dim) throw ConfigError("embedding for '" + text + "' has the wrong dimension");
  }
}

std::vector<std::vector<double>> TableEncoder::embed(std::span<const std::string> texts) const {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    if (auto it = vectors_.find(text); it != vectors_.end()) {
      out.push_back(it->second);
    } else {
      out.push_back(std::move(fallback_.embed(std::span(&text, 1)).front()));
    }
  }
  return out;
}

void TableEncoder::set(const std::string& text, std::vector<double> vector) {
  if (vector.size() != dim()) throw ConfigError("embedding for '" + text + "' has the wrong dimension");
  vectors_[text] = std::move(vector);
}

MockBackend backend_from_json_text(std::string_view json_text) {
  try {
    const auto doc = nlohmann::json::parse(json_text);
    ScoreTable table;
    if (doc.contains("scores")) {
      for (const auto& [context, row] : doc.at("scores").items()) {
        for (const auto& [candidate, p] : row.items()) table[context][candidate] = p.get<double>();
      }
    }
    const std::size_t dim = doc.value("dim", std::size_t{8});
    std::map<std::string, std::vector<double>, std::less<>> vectors;
    if (doc.contains("embeddings")) {
      for (const auto& [text, v] : doc.at("embeddings").items()) vectors[text] = v.get<std::vector<double>>();
    }
    return {std::make_shared<MockScorer>(std::move(table), doc.value("name", std::string("mock"))),
            std::make_shared<TableEncoder>(dim, std::move(vectors))};
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("mock scorer table: ") + e.what());
  }
}

MockBackend load_backend(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read mock scorer table " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return backend_from_json_text(buf.str());
}

}  // namespace soup::mock
