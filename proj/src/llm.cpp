// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors

#include "pgakv/llm.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

#include <openssl/evp.h>

#include "http.hpp"

namespace pgakv {

void to_json(nlohmann::json& j, const LlmParams& p) {
  j = nlohmann::json{{"temperature", p.temperature}, {"max_tokens", p.max_tokens}};
  j["seed"] = p.seed ? nlohmann::json(*p.seed) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, LlmParams& p) {
  p.temperature = j.at("temperature").get<double>();
  p.max_tokens = j.at("max_tokens").get<int>();
  if (j.contains("seed") && !j.at("seed").is_null()) {
    p.seed = j.at("seed").get<std::int64_t>();
  } else {
    p.seed.reset();
  }
}

// --- CallLog -------------------------------------------------------------

std::string CallLog::complete(const std::string& prompt, const LlmParams& params) {
  {
    std::lock_guard lock(mu_);
    calls_.push_back({prompt, params});
  }
  return inner_.complete(prompt, params);
}

std::vector<CallLog::Call> CallLog::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

std::size_t CallLog::count() const {
  std::lock_guard lock(mu_);
  return calls_.size();
}

void CallLog::clear() {
  std::lock_guard lock(mu_);
  calls_.clear();
}

// --- rate limiting -------------------------------------------------------

ConcurrencyLimiter::ConcurrencyLimiter(std::size_t max_in_flight)
    : max_(std::max<std::size_t>(1, max_in_flight)) {}

void ConcurrencyLimiter::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return in_flight_ < max_; });
  ++in_flight_;
}

void ConcurrencyLimiter::release() {
  {
    std::lock_guard lock(mu_);
    --in_flight_;
  }
  cv_.notify_one();
}

TokenBucket::TokenBucket(double rate, double burst, Now now, Sleeper sleep)
    : rate_(rate),
      burst_(std::max(1.0, burst)),
      tokens_(std::max(1.0, burst)),
      now_(std::move(now)),
      sleep_(sleep ? std::move(sleep)
                   : Sleeper([](Clock::duration d) { std::this_thread::sleep_for(d); })),
      last_(now_()) {}

void TokenBucket::take() {
  if (rate_ <= 0.0) return;
  std::unique_lock lock(mu_);
  while (true) {
    auto t = now_();
    double elapsed = std::chrono::duration<double>(t - last_).count();
    last_ = t;
    tokens_ = std::min(burst_, tokens_ + elapsed * rate_);
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
    sleep_(std::chrono::duration_cast<Clock::duration>(wait) + Clock::duration(1));
  }
}

// --- HTTP client ---------------------------------------------------------

HttpLlmClient::HttpLlmClient(HttpLlmConfig cfg)
    : cfg_(std::move(cfg)),
      limiter_(cfg_.max_in_flight),
      bucket_(cfg_.requests_per_second, cfg_.burst) {
  if (cfg_.base_url.empty()) throw ContractError("LLM base URL is empty");
  if (cfg_.model.empty()) throw ContractError("LLM model name is empty");
  parse_http_url(cfg_.base_url);
}

nlohmann::json HttpLlmClient::request_body(const std::string& model,
                                           const std::string& prompt,
                                           const LlmParams& params) {
  nlohmann::json body{
      {"model", model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", params.temperature},
      {"max_tokens", params.max_tokens},
  };
  if (params.seed) body["seed"] = *params.seed;
  return body;
}

std::string HttpLlmClient::complete(const std::string& prompt, const LlmParams& params) {
  HttpTarget target = parse_http_url(cfg_.base_url);
  std::string path = target.path;
  if (path.back() != '/') path += '/';
  path += "chat/completions";
  if (path.starts_with("//")) path.erase(0, 1);

  bucket_.take();
  ConcurrencyLimiter::Slot slot(limiter_);
  auto client = make_http_client(target, cfg_.timeout_seconds);
  httplib::Headers headers;
  if (!cfg_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + cfg_.api_key);
  }
  auto res = client->Post(path, headers, request_body(cfg_.model, prompt, params).dump(),
                          "application/json");
  if (!res) {
    throw TransportError("LLM request to " + cfg_.base_url + " failed: " +
                         httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw TransportError("LLM endpoint returned HTTP " + std::to_string(res->status) +
                         ": " + res->body.substr(0, 200));
  }
  try {
    auto json = nlohmann::json::parse(res->body);
    return json.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed chat-completion response: ") + e.what());
  }
}

// --- cassette ------------------------------------------------------------

std::string request_digest(const std::string& prompt, const LlmParams& params) {
  nlohmann::json canon{{"prompt", prompt}, {"params", params}};
  std::string bytes = canon.dump();

  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[md[i] >> 4];
    hex += kHex[md[i] & 0xF];
  }
  return hex;
}

Cassette::Cassette(Cassette&& other) noexcept
    : frozen_(other.frozen()),
      entries_(std::move(other.entries_)),
      by_digest_(std::move(other.by_digest_)) {}

Cassette Cassette::load(std::istream& in) {
  Cassette c;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("cassette is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError(1, "cassette must be a JSON array");
  for (std::size_t i = 0; i < doc.size(); ++i) {
    try {
      const auto& e = doc[i];
      CassetteEntry entry{e.at("digest").get<std::string>(), e.at("prompt").get<std::string>(),
                          e.at("params").get<LlmParams>(),
                          e.at("response").get<std::string>()};
      if (entry.digest != request_digest(entry.prompt, entry.params)) {
        throw Error("digest does not match prompt and params");
      }
      c.add(std::move(entry));
    } catch (const std::exception& ex) {
      throw ParseError(i + 1, std::string("bad cassette entry: ") + ex.what());
    }
  }
  return c;
}

Cassette Cassette::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open cassette " + path);
  return load(in);
}

void Cassette::save(std::ostream& out) const {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& e : entries()) {
    doc.push_back({{"digest", e.digest},
                   {"prompt", e.prompt},
                   {"params", e.params},
                   {"response", e.response}});
  }
  out << doc.dump(2) << '\n';
}

void Cassette::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write cassette " + path);
  save(out);
}

const CassetteEntry* Cassette::find_unlocked(const std::string& digest,
                                             const std::string& prompt,
                                             const LlmParams& params) const {
  auto it = by_digest_.find(digest);
  if (it == by_digest_.end()) return nullptr;
  const CassetteEntry& e = entries_[it->second];
  if (e.prompt != prompt || e.params != params) {
    throw Error("cassette digest collision for " + digest);
  }
  return &e;
}

std::optional<std::string> Cassette::lookup(const std::string& digest,
                                           const std::string& prompt,
                                           const LlmParams& params) const {
  if (frozen()) {
    const auto* e = find_unlocked(digest, prompt, params);
    return e ? std::optional<std::string>(e->response) : std::nullopt;
  }
  std::lock_guard lock(mu_);
  const auto* e = find_unlocked(digest, prompt, params);
  return e ? std::optional<std::string>(e->response) : std::nullopt;
}

std::string Cassette::add(CassetteEntry entry) {
  if (frozen()) throw Error("cannot record into a frozen cassette");
  std::lock_guard lock(mu_);
  if (const auto* existing = find_unlocked(entry.digest, entry.prompt, entry.params)) {
    return existing->response;
  }
  by_digest_.emplace(entry.digest, entries_.size());
  entries_.push_back(std::move(entry));
  return entries_.back().response;
}

std::vector<CassetteEntry> Cassette::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::size_t Cassette::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

CassetteClient::CassetteClient(Cassette& cassette, CassetteMode mode, LlmClient* upstream)
    : cassette_(cassette), mode_(mode), upstream_(upstream) {
  if (mode_ == CassetteMode::kRecord && upstream_ == nullptr) {
    throw ContractError("record mode needs an upstream LLM client");
  }
  if (mode_ == CassetteMode::kReplay) cassette_.freeze();
}

std::string CassetteClient::complete(const std::string& prompt, const LlmParams& params) {
  std::string digest = request_digest(prompt, params);
  if (auto hit = cassette_.lookup(digest, prompt, params)) return *std::move(hit);
  if (mode_ == CassetteMode::kReplay) throw ReplayMissError(digest);
  std::string response = upstream_->complete(prompt, params);
  return cassette_.add({digest, prompt, params, std::move(response)});
}

}  // namespace pgakv
