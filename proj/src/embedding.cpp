// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors

#include "pgakv/embedding.hpp"

#include <cctype>
#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "http.hpp"

namespace pgakv {

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool normalize(Vector& v) noexcept {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  if (sq == 0.0 || !std::isfinite(sq)) return false;
  double inv = 1.0 / std::sqrt(sq);
  for (double& x : v) x *= inv;
  return true;
}

std::vector<std::string> hashing_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    std::size_t b = 0, e = cur.size();
    while (b < e && std::ispunct(static_cast<unsigned char>(cur[b]))) ++b;
    while (e > b && std::ispunct(static_cast<unsigned char>(cur[e - 1]))) --e;
    if (e > b) tokens.push_back(cur.substr(b, e - b));
    cur.clear();
  };
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  flush();
  return tokens;
}

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw ContractError("embedding dimension must be positive");
}

std::string HashingEmbedder::fingerprint() {
  return "builtin-hash:fnv1a64-signed:dim=" + std::to_string(dimension_) + ":v1";
}

Vector HashingEmbedder::embed_one(std::string_view text) const {
  Vector v(dimension_, 0.0);
  auto tokens = hashing_tokens(text);
  for (const auto& tok : tokens) {
    std::uint64_t h = fnv1a64(tok);
    v[h % dimension_] += (h >> 63) ? -1.0 : 1.0;
  }
  if (!normalize(v)) {
    // No tokens, or colliding tokens cancelled out: fall back to one feature
    // for the whole text so the vector stays unit-norm and deterministic.
    std::fill(v.begin(), v.end(), 0.0);
    v[fnv1a64(text) % dimension_] = 1.0;
  }
  return v;
}

std::vector<Vector> HashingEmbedder::embed(std::span<const std::string> texts) {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

RemoteEmbedder::RemoteEmbedder(std::string url, std::optional<std::size_t> dimension)
    : url_(std::move(url)), dimension_(dimension) {}

std::size_t RemoteEmbedder::dimension() {
  if (!dimension_) {
    const std::string probe[] = {"dimension probe"};
    dimension_ = post(probe).front().size();
  }
  return *dimension_;
}

std::string RemoteEmbedder::fingerprint() {
  return "remote:" + url_ + ":dim=" + std::to_string(dimension());
}

std::vector<Vector> RemoteEmbedder::embed(std::span<const std::string> texts) {
  if (texts.empty()) return {};
  auto vectors = post(texts);
  std::size_t dim = dimension();
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != dim) {
      throw ProviderError("embedding " + std::to_string(i) + " has dimension " +
                          std::to_string(vectors[i].size()) + ", expected " +
                          std::to_string(dim));
    }
  }
  return vectors;
}

std::vector<Vector> RemoteEmbedder::post(std::span<const std::string> texts) {
  nlohmann::json body;
  body["texts"] = nlohmann::json::array();
  for (const auto& t : texts) body["texts"].push_back(t);

  HttpTarget target = parse_http_url(url_);
  auto client = make_http_client(target);
  auto res = client->Post(target.path, body.dump(), "application/json");
  if (!res) {
    throw ProviderError("embedding request to " + url_ + " failed: " +
                        httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ProviderError("embedding endpoint returned HTTP " +
                        std::to_string(res->status));
  }
  std::vector<Vector> out;
  try {
    auto json = nlohmann::json::parse(res->body);
    out = json.at("vectors").get<std::vector<Vector>>();
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("malformed embedding response: ") + e.what());
  }
  if (out.size() != texts.size()) {
    throw ProviderError("embedding endpoint returned " + std::to_string(out.size()) +
                        " vectors for " + std::to_string(texts.size()) + " texts");
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].empty() || !normalize(out[i])) {
      throw ProviderError("embedding " + std::to_string(i) + " is a zero vector");
    }
  }
  return out;
}

}  // namespace pgakv
