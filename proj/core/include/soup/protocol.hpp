// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0
//
// JSON wire format of the scoring service and an HTTP client for it.
//
//   POST /score_mask  {"parts": [{"text": str, "truncate_to": int|null}], "candidates": [str]}
//                     -> {"scores": {candidate: float}} | 400 {"error": str}
//   POST /embed       {"texts": [str]} -> {"dim": int, "vectors": [[float]]}
//   GET  /info        -> {"model": str, "encoder": str, "dim": int, "max_context_tokens": int}

#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "soup/scorer.hpp"

namespace soup::protocol {

inline constexpr std::string_view kScorerUrlEnv = "SOUP_SCORER_URL";

struct ServiceInfo {
  std::string model;
  std::string encoder;
  std::size_t dim = 0;
  std::size_t max_context_tokens = 0;
};

struct EmbedResponse {
  std::size_t dim = 0;
  std::vector<std::vector<double>> vectors;
};

// Encoders throw ProtocolError on schema violations.
nlohmann::json to_json(const ScoreRequest& request);
nlohmann::json to_json(const ScoreResponse& response);
nlohmann::json to_json(const ServiceInfo& info);
nlohmann::json to_json(const EmbedResponse& response);
nlohmann::json embed_request_json(std::span<const std::string> texts);

ScoreRequest score_request_from_json(const nlohmann::json& j);
ScoreResponse score_response_from_json(const nlohmann::json& j);
ServiceInfo service_info_from_json(const nlohmann::json& j);
EmbedResponse embed_response_from_json(const nlohmann::json& j);
std::vector<std::string> embed_request_from_json(const nlohmann::json& j);

/// `explicit_url` if set, else $SOUP_SCORER_URL; nullopt when neither is.
std::optional<std::string> resolve_scorer_url(std::optional<std::string> explicit_url);

/// Scorer and encoder backed by a remote service. Transport failures raise
/// IoError; 4xx answers raise ProtocolError.
class HttpBackend final : public Scorer, public Encoder {
 public:
  explicit HttpBackend(std::string base_url, std::chrono::seconds timeout = std::chrono::seconds(300));
  ~HttpBackend() override;

  HttpBackend(const HttpBackend&) = delete;
  HttpBackend& operator=(const HttpBackend&) = delete;

  ScoreResponse score_mask(const ScoreRequest& request) const override;
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) const override;
  std::string identity() const override;

  /// GET /info, cached after the first successful call.
  ServiceInfo info() const;

  const std::string& base_url() const noexcept { return base_url_; }

 private:
  nlohmann::json post(const std::string& path, const nlohmann::json& body) const;
  nlohmann::json get(const std::string& path) const;

  std::string base_url_;
  std::chrono::seconds timeout_;
  mutable std::mutex info_mu_;
  mutable std::optional<ServiceInfo> info_;
};

}  // namespace soup::protocol
