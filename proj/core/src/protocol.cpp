// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0

#include "soup/protocol.hpp"

#include <cstdlib>

#include <httplib.h>

#include "soup/error.hpp"

namespace soup::protocol {

using nlohmann::json;

namespace {

template <typename F>
auto decode(std::string_view what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ProtocolError("malformed " + std::string(what) + ": " + e.what());
  }
}

}  // namespace

json to_json(const ScoreRequest& request) {
  json parts = json::array();
  for (const auto& p : request.parts) {
    parts.push_back({{"text", p.text}, {"truncate_to", p.truncate_to ? json(*p.truncate_to) : json(nullptr)}});
  }
  return {{"parts", std::move(parts)}, {"candidates", request.candidates}};
}

json to_json(const ScoreResponse& response) { return {{"scores", response.scores}}; }

json to_json(const ServiceInfo& info) {
  return {{"model", info.model},
          {"encoder", info.encoder},
          {"dim", info.dim},
          {"max_context_tokens", info.max_context_tokens}};
}

json to_json(const EmbedResponse& response) { return {{"dim", response.dim}, {"vectors", response.vectors}}; }

json embed_request_json(std::span<const std::string> texts) {
  return {{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
}

ScoreRequest score_request_from_json(const json& j) {
  return decode("score request", [&] {
    ScoreRequest request;
    for (const auto& p : j.at("parts")) {
      ContextPart part{p.at("text").get<std::string>(), std::nullopt};
      if (p.contains("truncate_to") && !p.at("truncate_to").is_null()) {
        part.truncate_to = p.at("truncate_to").get<std::size_t>();
      }
      request.parts.push_back(std::move(part));
    }
    request.candidates = j.at("candidates").get<std::vector<std::string>>();
    return request;
  });
}

ScoreResponse score_response_from_json(const json& j) {
  return decode("score response", [&] {
    ScoreResponse response;
    for (const auto& [candidate, p] : j.at("scores").items()) response.scores[candidate] = p.get<double>();
    return response;
  });
}

ServiceInfo service_info_from_json(const json& j) {
  return decode("info response", [&] {
    return ServiceInfo{j.at("model").get<std::string>(), j.at("encoder").get<std::string>(),
                       j.at("dim").get<std::size_t>(), j.at("max_context_tokens").get<std::size_t>()};
  });
}

EmbedResponse embed_response_from_json(const json& j) {
  return decode("embed response", [&] {
    EmbedResponse response{j.at("dim").get<std::size_t>(), j.at("vectors").get<std::vector<std::vector<double>>>()};
    for (const auto& v : response.vectors) {
      if (v.size() != response.dim) throw ProtocolError("embed response vector does not match reported dim");
    }
    return response;
  });
}

std::vector<std::string> embed_request_from_json(const json& j) {
  return decode("embed request", [&] { return j.at("texts").get<std::vector<std::string>>(); });
}

std::optional<std::string> resolve_scorer_url(std::optional<std::string> explicit_url) {
  if (explicit_url && !explicit_url->empty()) return explicit_url;
  if (const char* env = std::getenv(std::string(kScorerUrlEnv).c_str()); env != nullptr && *env != '\0') {
    return std::string(env);
  }
  return std::nullopt;
}

HttpBackend::HttpBackend(std::string base_url, std::chrono::seconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  if (base_url_.empty()) throw ConfigError("scorer URL is empty");
}

HttpBackend::~HttpBackend() = default;

namespace {

httplib::Client make_client(const std::string& base_url, std::chrono::seconds timeout) {
  httplib::Client client(base_url);
  if (!client.is_valid()) throw ConfigError("invalid scorer URL '" + base_url + "'");
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  return client;
}

json handle_reply(const httplib::Result& res, const std::string& url) {
  if (!res) throw IoError("request to " + url + " failed: " + httplib::to_string(res.error()));
  json body;
  try {
    body = json::parse(res->body);
  } catch (const json::exception&) {
    if (res->status >= 500) throw IoError(url + " returned HTTP " + std::to_string(res->status));
    throw ProtocolError(url + " returned a non-JSON body (HTTP " + std::to_string(res->status) + ")");
  }
  if (res->status >= 400) {
    const std::string msg = body.is_object() ? body.value("error", std::string("unknown error")) : res->body;
    if (res->status >= 500) throw IoError(url + " returned HTTP " + std::to_string(res->status) + ": " + msg);
    throw ProtocolError(url + " rejected the request: " + msg);
  }
  return body;
}

}  // namespace

// httplib::Client is not safe to share between threads, so each call opens
// its own client.
json HttpBackend::post(const std::string& path, const json& body) const {
  auto client = make_client(base_url_, timeout_);
  return handle_reply(client.Post(path, body.dump(), "application/json"), base_url_ + path);
}

json HttpBackend::get(const std::string& path) const {
  auto client = make_client(base_url_, timeout_);
  return handle_reply(client.Get(path), base_url_ + path);
}

ScoreResponse HttpBackend::score_mask(const ScoreRequest& request) const {
  return score_response_from_json(post("/score_mask", to_json(request)));
}

std::vector<std::vector<double>> HttpBackend::embed(std::span<const std::string> texts) const {
  auto response = embed_response_from_json(post("/embed", embed_request_json(texts)));
  if (const auto expected = info().dim; expected != 0 && response.dim != expected) {
    throw ProtocolError("embed returned dim " + std::to_string(response.dim) + ", /info reports " +
                        std::to_string(expected));
  }
  return std::move(response.vectors);
}

ServiceInfo HttpBackend::info() const {
  std::lock_guard lock(info_mu_);
  if (!info_) info_ = service_info_from_json(get("/info"));
  return *info_;
}

std::string HttpBackend::identity() const { return base_url_ + "#" + info().model; }

}  // namespace soup::protocol
