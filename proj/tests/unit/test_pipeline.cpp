// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors

#include <gtest/gtest.h>

#include <deque>

#include "fixture.hpp"
#include "pgakv/eval.hpp"
#include "pgakv/pipeline.hpp"

using namespace pgakv;

namespace {

constexpr const char* kGood =
    "```cypher\nCREATE (a {name: \"Australia\"})-[:CAPITAL]->(b {name: \"Sydney\"})\n```";

// Hands out canned replies in order and remembers the prompts.
class Script : public LlmClient {
 public:
  explicit Script(std::deque<std::string> replies) : replies_(std::move(replies)) {}
  std::string complete(const std::string& prompt, const LlmParams&) override {
    prompts.push_back(prompt);
    if (replies_.empty()) return "out of script";
    std::string r = replies_.front();
    replies_.pop_front();
    return r;
  }
  std::vector<std::string> prompts;

 private:
  std::deque<std::string> replies_;
};

const PromptBundle& B() { return PromptBundle::defaults(); }

}  // namespace

TEST(Generate, FirstReplyValid) {
  Script llm({kGood});
  auto r = generate_pseudo_graph("q", llm, B());
  EXPECT_EQ(r.retries, 0u);
  EXPECT_EQ(r.graph.size(), 1u);
  EXPECT_EQ(r.graph.stage(), Stage::kPseudo);
  EXPECT_EQ(llm.prompts.size(), 1u);
}

TEST(Generate, InvalidThenValidIsTwoCalls) {
  Script llm({"I think it is Sydney.", kGood});
  auto r = generate_pseudo_graph("q", llm, B());
  EXPECT_EQ(llm.prompts.size(), 2u);
  EXPECT_EQ(r.retries, 1u);
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_NE(llm.prompts[1].find("I think it is Sydney."), std::string::npos);
  EXPECT_NE(llm.prompts[1].find(r.errors[0]), std::string::npos);
}

TEST(Generate, ExhaustionAfterOnePlusMaxRetries) {
  for (std::size_t max_retries : {0u, 1u, 2u, 4u}) {
    Script llm({});
    try {
      generate_pseudo_graph("q", llm, B(), max_retries);
      FAIL();
    } catch (const GenerationFailure& e) {
      EXPECT_EQ(e.attempts(), 1 + max_retries);
      EXPECT_EQ(llm.prompts.size(), 1 + max_retries);
    }
  }
}

TEST(Generate, DecodeFailureAndEmptyGraphCountAsFailures) {
  Script llm({"```cypher\nCREATE (a:Person)-[:R]->(b:Thing)\n```", "```cypher\nCREATE (a {name: \"x\"})\n```",
              kGood});
  auto r = generate_pseudo_graph("q", llm, B());
  EXPECT_EQ(r.retries, 2u);
  EXPECT_EQ(r.graph.size(), 1u);
}

TEST(Verify, ParsesFixedGraph) {
  Graph pseudo;
  pseudo.add(Triple("Australia", "capital", "Sydney"));
  Graph gt;
  gt.add(Triple("Australia", "capital", "Canberra"));
  std::vector<EntityConfidence> conf = {{"Australia", 0.9, 1}};
  Script llm({"Fixed graph:\nAustralia | capital | Canberra\n"});
  auto r = verify(pseudo, gt, conf, llm, B());
  EXPECT_FALSE(r.fallback);
  EXPECT_EQ(r.retries, 0u);
  EXPECT_EQ(r.fixed.stage(), Stage::kFixed);
  EXPECT_TRUE(r.fixed.contains(Triple("Australia", "capital", "Canberra")));
}

TEST(Verify, RetryThenFallbackMerges) {
  Graph pseudo;
  pseudo.add(Triple("Australia", "capital", "Sydney"));
  Graph gt;
  gt.add(Triple("Australia", "capital", "Canberra"));
  std::vector<EntityConfidence> conf = {{"Australia", 0.9, 1}};

  Script once({"no idea", "Australia | capital | Canberra"});
  auto r1 = verify(pseudo, gt, conf, once, B());
  EXPECT_EQ(r1.retries, 1u);
  EXPECT_FALSE(r1.fallback);
  EXPECT_EQ(r1.fixed.size(), 1u);

  Script twice({"no idea", "still no idea"});
  auto r2 = verify(pseudo, gt, conf, twice, B());
  EXPECT_TRUE(r2.fallback);
  EXPECT_EQ(twice.prompts.size(), 2u);
  ASSERT_EQ(r2.fixed.size(), 2u);
  EXPECT_EQ(r2.fixed.triples()[0], Triple("Australia", "capital", "Canberra"));
  EXPECT_EQ(r2.fixed.triples()[1], Triple("Australia", "capital", "Sydney"));
  EXPECT_EQ(r2.fixed.stage(), Stage::kFixed);
}

TEST(Answer, TrimmedReply) {
  Script llm({"  Canberra \n"});
  EXPECT_EQ(answer("q", Graph{}, llm, B()), "Canberra");
}

TEST(RunPipeline, DegradedFallsBackToIoPrompt) {
  auto idx = fixture::toy_index();
  HashingEmbedder e;
  Script llm({"prose", "prose", "prose", "Leonardo da Vinci"});
  auto r = run_pipeline("Who painted the Mona Lisa?", idx, {e, llm});
  EXPECT_TRUE(r.trace.degraded);
  EXPECT_EQ(r.answer, "Leonardo da Vinci");
  EXPECT_EQ(r.trace.llm_calls, 4u);
  EXPECT_EQ(r.trace.generation_errors.size(), 3u);
  EXPECT_EQ(llm.prompts.back(), build_io_prompt("Who painted the Mona Lisa?", B()));
  EXPECT_FALSE(r.trace.warnings.empty());
}

TEST(RunPipeline, StagesWireTogether) {
  auto idx = fixture::toy_index();
  HashingEmbedder e;
  Script llm({kGood, "Australia | capital | Canberra", "Canberra"});
  PipelineConfig cfg;
  cfg.prune.confidence_threshold = -1.0;  // keep whatever subject is selected
  auto r = run_pipeline("What is the capital of Australia?", idx, {e, llm}, cfg);
  EXPECT_FALSE(r.trace.degraded);
  EXPECT_EQ(r.answer, "Canberra");
  EXPECT_EQ(r.trace.llm_calls, 3u);
  EXPECT_EQ(r.trace.temp, query_top_k(idx, r.trace.pseudo.triples()[0], e, 10));
  ASSERT_EQ(r.trace.confidences.size(), 1u);
  ASSERT_FALSE(r.trace.ground_truth.empty());
  for (const auto& t : r.trace.ground_truth) {
    EXPECT_EQ(t.subject(), r.trace.confidences[0].subject);
    EXPECT_NE(llm.prompts[1].find(to_line(t) + "\n"), std::string::npos) << to_line(t);
  }
  EXPECT_NE(llm.prompts[2].find("Knowledge graph:\nAustralia | capital | Canberra\n"),
            std::string::npos);
}

TEST(RunPipeline, LowConfidenceLeavesNoRetrievedFacts) {
  auto idx = fixture::toy_index();
  HashingEmbedder e;
  Script llm({kGood, "Australia | capital | Sydney", "Sydney"});
  PipelineConfig cfg;
  cfg.prune.confidence_threshold = 1.0;
  auto r = run_pipeline("q", idx, {e, llm}, cfg);
  EXPECT_TRUE(r.trace.ground_truth.empty());
  EXPECT_NE(llm.prompts[1].find(std::string(kNoRetrievedFacts)), std::string::npos);
  EXPECT_EQ(r.trace.llm_calls, 3u);
}

TEST(RunPipeline, ToyQuestionsReplay) {
  auto idx = fixture::toy_index();
  HashingEmbedder e;
  Cassette c = fixture::cassette("toy_pgakv.json");
  CassetteClient llm(c, CassetteMode::kReplay);
  for (const auto& item : fixture::toy_questions()) {
    auto r = run_pipeline(item.question, idx, {e, llm});
    EXPECT_FALSE(r.trace.degraded) << item.id;
    EXPECT_EQ(hit_at_1(r.answer, item.gold), 1) << item.id << ": " << r.answer;
  }
}

TEST(RunPipeline, TraceJsonShape) {
  auto idx = fixture::toy_index();
  HashingEmbedder e;
  Script llm({kGood, "Australia | capital | Canberra", "Canberra"});
  auto j = to_json(run_pipeline("q", idx, {e, llm}).trace);
  for (const char* key : {"question", "degraded", "pseudo_graph", "temp_graph", "ground_truth_graph",
                          "confidences", "fixed_graph", "generation", "verification", "answer",
                          "llm_calls", "warnings"}) {
    EXPECT_TRUE(j.contains(key)) << key << " in " << j.dump();
  }
}
