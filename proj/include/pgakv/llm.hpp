// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors

#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "pgakv/error.hpp"

namespace pgakv {

struct LlmParams {
  double temperature = 0.0;
  int max_tokens = 512;
  std::optional<std::int64_t> seed;

  friend bool operator==(const LlmParams&, const LlmParams&) = default;
};

void to_json(nlohmann::json& j, const LlmParams& p);
void from_json(const nlohmann::json& j, LlmParams& p);

class TransportError : public Error {
 public:
  using Error::Error;
};

class ReplayMissError : public Error {
 public:
  explicit ReplayMissError(std::string digest)
      : Error("no cassette entry for request digest " + digest),
        digest_(std::move(digest)) {}
  const std::string& digest() const noexcept { return digest_; }

 private:
  std::string digest_;
};

/// Text completion. Implementations must be safe to call from several
/// threads at once.
class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual std::string complete(const std::string& prompt, const LlmParams& params) = 0;
};

/// Adapts a callable; used for scripted clients in tests and fixture recording.
class FunctionClient final : public LlmClient {
 public:
  using Fn = std::function<std::string(const std::string&, const LlmParams&)>;
  explicit FunctionClient(Fn fn) : fn_(std::move(fn)) {}
  std::string complete(const std::string& prompt, const LlmParams& params) override {
    return fn_(prompt, params);
  }

 private:
  Fn fn_;
};

/// Records every request passed through to `inner`.
class CallLog final : public LlmClient {
 public:
  struct Call {
    std::string prompt;
    LlmParams params;
  };

  explicit CallLog(LlmClient& inner) : inner_(inner) {}
  std::string complete(const std::string& prompt, const LlmParams& params) override;

  std::vector<Call> calls() const;
  std::size_t count() const;
  void clear();

 private:
  LlmClient& inner_;
  mutable std::mutex mu_;
  std::vector<Call> calls_;
};

/// Caps the number of requests in flight.
class ConcurrencyLimiter {
 public:
  explicit ConcurrencyLimiter(std::size_t max_in_flight);
  void acquire();
  void release();

  class Slot {
   public:
    explicit Slot(ConcurrencyLimiter& l) : l_(l) { l_.acquire(); }
    ~Slot() { l_.release(); }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

   private:
    ConcurrencyLimiter& l_;
  };

 private:
  std::size_t max_;
  std::size_t in_flight_ = 0;
  std::mutex mu_;
  std::condition_variable cv_;
};

/// Token bucket: `rate` tokens per second, at most `burst` banked. A rate of
/// zero disables limiting.
class TokenBucket {
 public:
  using Clock = std::chrono::steady_clock;
  using Sleeper = std::function<void(Clock::duration)>;
  using Now = std::function<Clock::time_point()>;

  TokenBucket(double rate, double burst, Now now = Clock::now, Sleeper sleep = {});

  /// Blocks until one token is available and consumes it.
  void take();

 private:
  double rate_;
  double burst_;
  double tokens_;
  Now now_;
  Sleeper sleep_;
  Clock::time_point last_;
  std::mutex mu_;
};

struct HttpLlmConfig {
  std::string base_url;  // e.g. https://api.openai.com/v1
  std::string model;
  std::string api_key;   // read from the environment by callers
  std::size_t max_in_flight = 4;
  double requests_per_second = 0.0;
  double burst = 1.0;
  int timeout_seconds = 120;
};

/// Chat-completion client: POST <base_url>/chat/completions with a single user
/// message, returns choices[0].message.content.
class HttpLlmClient final : public LlmClient {
 public:
  explicit HttpLlmClient(HttpLlmConfig cfg);
  std::string complete(const std::string& prompt, const LlmParams& params) override;

  static nlohmann::json request_body(const std::string& model, const std::string& prompt,
                                     const LlmParams& params);

 private:
  HttpLlmConfig cfg_;
  ConcurrencyLimiter limiter_;
  TokenBucket bucket_;
};

/// Hex SHA-256 over the canonical JSON of (prompt, params).
std::string request_digest(const std::string& prompt, const LlmParams& params);

struct CassetteEntry {
  std::string digest;
  std::string prompt;
  LlmParams params;
  std::string response;
};

/// Recorded request/response pairs, persisted as a JSON array.
class Cassette {
 public:
  Cassette() = default;
  Cassette(Cassette&& other) noexcept;
  Cassette& operator=(Cassette&&) = delete;

  static Cassette load(std::istream& in);
  static Cassette load_file(const std::string& path);
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;

  /// Stored response, or nullopt on a miss. Throws Error when the digest
  /// matches but the stored prompt or params differ.
  std::optional<std::string> lookup(const std::string& digest, const std::string& prompt,
                                    const LlmParams& params) const;

  /// Appends unless an entry with the same digest exists. Returns the stored
  /// entry's response.
  std::string add(CassetteEntry entry);

  std::vector<CassetteEntry> entries() const;
  std::size_t size() const;

  /// After freezing, add() throws and find() reads without locking.
  void freeze() noexcept { frozen_.store(true, std::memory_order_release); }
  bool frozen() const noexcept { return frozen_.load(std::memory_order_acquire); }

 private:
  const CassetteEntry* find_unlocked(const std::string& digest, const std::string& prompt,
                                     const LlmParams& params) const;

  std::atomic<bool> frozen_{false};
  mutable std::mutex mu_;
  std::vector<CassetteEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_digest_;
};

enum class CassetteMode { kRecord, kReplay };

/// Replay: answers only from the cassette, throwing ReplayMissError on a miss.
/// Record: forwards misses to `upstream` and stores the result.
class CassetteClient final : public LlmClient {
 public:
  CassetteClient(Cassette& cassette, CassetteMode mode, LlmClient* upstream = nullptr);
  std::string complete(const std::string& prompt, const LlmParams& params) override;

 private:
  Cassette& cassette_;
  CassetteMode mode_;
  LlmClient* upstream_;
};

}  // namespace pgakv
