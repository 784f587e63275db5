// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors

#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "fixture.hpp"
#include "pgakv/llm.hpp"

using namespace pgakv;
using namespace std::chrono_literals;

namespace {

// Digests below were computed independently with Python's hashlib over
// json.dumps(..., sort_keys=True, separators=(",", ":")).
constexpr const char* kDigestHi =
    "41ace2ec34189ec3736af283e1512416f367be8bb19b89252140c936527b5870";
constexpr const char* kDigestSeeded =
    "ce18122cfdba1e7bc24568e0251182476a19c26959e86cf73ca525456bdb2caf";

LlmParams seeded() {
  LlmParams p;
  p.temperature = 0.7;
  p.seed = 1;
  return p;
}

FunctionClient echo([](const std::string& prompt, const LlmParams&) {
  return "echo:" + prompt;
});

struct ChatServer {
  explicit ChatServer(httplib::Server::Handler h) {
    server.Post("/v1/chat/completions", std::move(h));
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~ChatServer() {
    server.stop();
    thread.join();
  }
  std::string base() const { return "http://127.0.0.1:" + std::to_string(port) + "/v1"; }

  httplib::Server server;
  int port = 0;
  std::thread thread;
};

}  // namespace

TEST(RequestDigest, MatchesIndependentSha256) {
  EXPECT_EQ(request_digest("hi", LlmParams{}), kDigestHi);
  EXPECT_EQ(request_digest("Q: x\nA:", seeded()), kDigestSeeded);
}

TEST(RequestDigest, SensitiveToEveryField) {
  LlmParams p = seeded();
  std::string base = request_digest("p", p);
  p.seed = 2;
  EXPECT_NE(request_digest("p", p), base);
  p = seeded();
  p.temperature = 0.0;
  EXPECT_NE(request_digest("p", p), base);
  p = seeded();
  p.max_tokens = 10;
  EXPECT_NE(request_digest("p", p), base);
  EXPECT_NE(request_digest("p ", seeded()), base);
}

TEST(Cassette, SaveLoadRoundTrip) {
  Cassette c;
  c.add({request_digest("a", LlmParams{}), "a", LlmParams{}, "A"});
  c.add({request_digest("b", seeded()), "b", seeded(), "B"});
  std::ostringstream out;
  c.save(out);
  std::istringstream in(out.str());
  Cassette back = Cassette::load(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.lookup(request_digest("b", seeded()), "b", seeded()), "B");
  std::ostringstream again;
  back.save(again);
  EXPECT_EQ(again.str(), out.str());
}

TEST(Cassette, LoadRejectsTamperedEntry) {
  std::istringstream in(
      "[{\"digest\": \"00\", \"prompt\": \"a\", \"params\": {\"temperature\": 0.0, "
      "\"max_tokens\": 512, \"seed\": null}, \"response\": \"A\"}]");
  EXPECT_THROW(Cassette::load(in), ParseError);
  std::istringstream not_json("{");
  EXPECT_THROW(Cassette::load(not_json), ParseError);
  std::istringstream not_array("{}");
  EXPECT_THROW(Cassette::load(not_array), ParseError);
}

TEST(Cassette, CollisionIsAnError) {
  Cassette c;
  c.add({"d", "a", LlmParams{}, "A"});
  EXPECT_THROW(c.lookup("d", "other prompt", LlmParams{}), Error);
  EXPECT_FALSE(c.lookup("e", "a", LlmParams{}).has_value());
}

TEST(Cassette, AddKeepsFirstAndFreezeBlocksWrites) {
  Cassette c;
  EXPECT_EQ(c.add({"d", "a", LlmParams{}, "first"}), "first");
  EXPECT_EQ(c.add({"d", "a", LlmParams{}, "second"}), "first");
  EXPECT_EQ(c.size(), 1u);
  c.freeze();
  EXPECT_THROW(c.add({"e", "b", LlmParams{}, "x"}), Error);
  EXPECT_EQ(c.lookup("d", "a", LlmParams{}), "first");
}

TEST(CassetteClient, ReplayHitAndMiss) {
  Cassette c;
  c.add({request_digest("a", LlmParams{}), "a", LlmParams{}, "A"});
  CassetteClient client(c, CassetteMode::kReplay);
  EXPECT_TRUE(c.frozen());
  EXPECT_EQ(client.complete("a", LlmParams{}), "A");
  try {
    client.complete("a", seeded());
    FAIL();
  } catch (const ReplayMissError& e) {
    EXPECT_EQ(e.digest(), request_digest("a", seeded()));
    EXPECT_NE(std::string(e.what()).find(e.digest()), std::string::npos);
  }
}

TEST(CassetteClient, RecordForwardsOnlyMisses) {
  Cassette c;
  CallLog log(echo);
  CassetteClient client(c, CassetteMode::kRecord, &log);
  EXPECT_EQ(client.complete("x", LlmParams{}), "echo:x");
  EXPECT_EQ(client.complete("x", LlmParams{}), "echo:x");
  EXPECT_EQ(client.complete("y", LlmParams{}), "echo:y");
  EXPECT_EQ(log.count(), 2u);
  EXPECT_EQ(c.size(), 2u);
  EXPECT_THROW(CassetteClient(c, CassetteMode::kRecord), ContractError);
}

TEST(CassetteClient, CommittedFixturesAreConsistent) {
  for (const char* name : {"toy_pgakv.json", "toy_baselines.json", "degraded.json"}) {
    Cassette c = fixture::cassette(name);
    EXPECT_GT(c.size(), 0u) << name;
    for (const auto& e : c.entries()) {
      EXPECT_EQ(e.digest, request_digest(e.prompt, e.params)) << name;
    }
  }
}

TEST(CallLog, RecordsPromptsAndParams) {
  CallLog log(echo);
  log.complete("p1", LlmParams{});
  log.complete("p2", seeded());
  auto calls = log.calls();
  ASSERT_EQ(calls.size(), 2u);
  EXPECT_EQ(calls[1].prompt, "p2");
  EXPECT_EQ(calls[1].params, seeded());
  log.clear();
  EXPECT_EQ(log.count(), 0u);
}

TEST(TokenBucket, WaitsForRefillWithFakeClock) {
  auto now = TokenBucket::Clock::time_point{};
  std::vector<TokenBucket::Clock::duration> sleeps;
  TokenBucket bucket(
      2.0, 2.0, [&] { return now; },
      [&](TokenBucket::Clock::duration d) {
        sleeps.push_back(d);
        now += d;
      });
  bucket.take();
  bucket.take();
  EXPECT_TRUE(sleeps.empty());
  bucket.take();
  ASSERT_EQ(sleeps.size(), 1u);
  EXPECT_NEAR(std::chrono::duration<double>(sleeps[0]).count(), 0.5, 1e-6);
  // Idle time refills, capped at the burst size.
  now += 10s;
  bucket.take();
  bucket.take();
  EXPECT_EQ(sleeps.size(), 1u);
  bucket.take();
  EXPECT_EQ(sleeps.size(), 2u);
}

TEST(TokenBucket, ZeroRateNeverWaits) {
  int sleeps = 0;
  TokenBucket bucket(0.0, 1.0, TokenBucket::Clock::now,
                     [&](TokenBucket::Clock::duration) { ++sleeps; });
  for (int i = 0; i < 100; ++i) bucket.take();
  EXPECT_EQ(sleeps, 0);
}

TEST(ConcurrencyLimiter, CapsInFlight) {
  ConcurrencyLimiter limiter(2);
  std::atomic<int> in_flight{0}, peak{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      ConcurrencyLimiter::Slot slot(limiter);
      int now = ++in_flight;
      int p = peak.load();
      while (now > p && !peak.compare_exchange_weak(p, now)) {
      }
      std::this_thread::sleep_for(5ms);
      --in_flight;
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_LE(peak.load(), 2);
  EXPECT_GE(peak.load(), 1);
}

TEST(HttpLlmClient, RequestBody) {
  auto body = HttpLlmClient::request_body("m", "hello", seeded());
  EXPECT_EQ(body["model"], "m");
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], "hello");
  EXPECT_EQ(body["temperature"], 0.7);
  EXPECT_EQ(body["seed"], 1);
  EXPECT_FALSE(HttpLlmClient::request_body("m", "x", LlmParams{}).contains("seed"));
}

TEST(HttpLlmClient, TalksToChatCompletions) {
  std::string auth, seen_body;
  ChatServer server([&](const httplib::Request& req, httplib::Response& res) {
    auth = req.get_header_value("Authorization");
    seen_body = req.body;
    auto in = nlohmann::json::parse(req.body);
    nlohmann::json out;
    out["choices"] = {{{"message", {{"content", "re: " + in["messages"][0]["content"].get<std::string>()}}}}};
    res.set_content(out.dump(), "application/json");
  });
  HttpLlmConfig cfg;
  cfg.base_url = server.base();
  cfg.model = "test-model";
  cfg.api_key = "k123";
  HttpLlmClient client(cfg);
  EXPECT_EQ(client.complete("ping", LlmParams{}), "re: ping");
  EXPECT_EQ(auth, "Bearer k123");
  EXPECT_EQ(nlohmann::json::parse(seen_body)["model"], "test-model");
}

TEST(HttpLlmClient, ErrorsAreTransportErrors) {
  ChatServer server([](const httplib::Request& req, httplib::Response& res) {
    if (req.body.find("bad-json") != std::string::npos) {
      res.set_content("{\"choices\": []}", "application/json");
    } else {
      res.status = 429;
      res.set_content("slow down", "text/plain");
    }
  });
  HttpLlmConfig cfg;
  cfg.base_url = server.base();
  cfg.model = "m";
  HttpLlmClient client(cfg);
  EXPECT_THROW(client.complete("x", LlmParams{}), TransportError);
  EXPECT_THROW(client.complete("bad-json", LlmParams{}), TransportError);
}

TEST(HttpLlmClient, ConfigValidation) {
  HttpLlmConfig cfg;
  cfg.model = "m";
  EXPECT_THROW(HttpLlmClient{cfg}, ContractError);
  cfg.base_url = "ftp://host";
  EXPECT_THROW(HttpLlmClient{cfg}, ContractError);
  cfg.base_url = "http://host/v1";
  cfg.model = "";
  EXPECT_THROW(HttpLlmClient{cfg}, ContractError);
}
