// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors

#include <gtest/gtest.h>

#include "pgakv/cypher.hpp"
#include "pgakv/prompts.hpp"

using namespace pgakv;

namespace {

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

const PromptBundle& B() { return PromptBundle::defaults(); }

}  // namespace

TEST(Bundle, ExampleCounts) {
  EXPECT_EQ(B().pseudo_graph_examples.size(), 2u);
  EXPECT_EQ(B().verification_examples.size(), 2u);
  EXPECT_EQ(B().answer_examples.size(), 2u);
  EXPECT_EQ(B().io_examples.size(), 6u);
  EXPECT_EQ(B().cot_examples.size(), 6u);
}

TEST(Bundle, CypherExamplesParse) {
  for (const auto& ex : B().pseudo_graph_examples) {
    EXPECT_FALSE(cypher::execute(cypher::parse_cypher(ex.cypher)).empty()) << ex.cypher;
  }
}

TEST(Bundle, VerificationExamplesAreLineFormat) {
  for (const auto& ex : B().verification_examples) {
    EXPECT_FALSE(parse_line_format(ex.pseudo_graph, Stage::kPseudo).empty());
    EXPECT_FALSE(parse_line_format(ex.retrieved_facts, Stage::kGroundTruth).empty());
    EXPECT_FALSE(parse_line_format(ex.fixed_graph, Stage::kFixed).empty());
  }
}

TEST(Prompts, RenderedExampleCounts) {
  std::string q = "Who wrote Dune?";
  EXPECT_EQ(count(build_pseudo_graph_prompt(q, B()), "\n```cypher\n"), 2u);
  EXPECT_EQ(count(build_answer_prompt(q, Graph{}, B()), "Question: "), 3u);
  EXPECT_EQ(count(build_io_prompt(q, B()), "Question: "), 7u);
  EXPECT_EQ(count(build_cot_prompt(q, B()), "Question: "), 7u);
  EXPECT_EQ(count(build_cot_prompt(q, B()), "Answer: "), 6u);
  Graph pseudo;
  pseudo.add(Triple("a", "r", "b"));
  EXPECT_EQ(count(build_verification_prompt(pseudo, Graph{}, {}, B()), "Fixed graph:\n"), 3u);
}

TEST(Prompts, QuestionIsLastAndBuildersArePure) {
  std::string q = "What is the capital of Australia?";
  std::string io = build_io_prompt(q, B());
  EXPECT_TRUE(io.ends_with("Question: " + q + "\nAnswer:"));
  EXPECT_EQ(io, build_io_prompt(q, B()));
  EXPECT_TRUE(build_pseudo_graph_prompt(q, B()).ends_with("Question: " + q + "\n"));
  EXPECT_TRUE(build_answer_prompt(q, Graph{}, B()).ends_with("Question: " + q + "\nAnswer:"));
}

TEST(Prompts, AnswerPromptFacts) {
  Graph facts;
  facts.add(Triple("Australia", "capital", "Canberra"));
  std::string p = build_answer_prompt("q", facts, B());
  EXPECT_NE(p.find("Knowledge graph:\nAustralia | capital | Canberra\nQuestion: q"),
            std::string::npos);
  std::string empty = build_answer_prompt("q", Graph{}, B());
  EXPECT_NE(empty.find(std::string(kNoVerifiedFacts) + "\nQuestion: q"), std::string::npos);
}

TEST(Prompts, RetryPromptCarriesError) {
  std::string p = build_pseudo_graph_retry_prompt("q", "not cypher", "syntax error at 1:1", B());
  EXPECT_TRUE(p.starts_with(build_pseudo_graph_prompt("q", B())));
  EXPECT_NE(p.find("not cypher"), std::string::npos);
  EXPECT_NE(p.find("syntax error at 1:1"), std::string::npos);
  std::string v = build_verification_retry_prompt("BASE", "prose");
  EXPECT_TRUE(v.starts_with("BASE"));
  EXPECT_TRUE(v.ends_with("Fixed graph:\n"));
}

TEST(Verification, MostConfidentGroupFirst) {
  Graph pseudo;
  pseudo.add(Triple("Sydney", "capital of", "Australia"));
  Graph gt(Stage::kGroundTruth);
  gt.add(Triple("Sydney", "country", "Australia"));
  gt.add(Triple("Australia", "capital", "Canberra"));
  gt.add(Triple("Sydney", "population", "5 million"));
  gt.add(Triple("Australia", "currency", "Australian dollar"));
  std::vector<EntityConfidence> conf = {{"Sydney", 0.75, 2}, {"Australia", 0.9, 2}};
  std::string p = build_verification_prompt(pseudo, gt, conf, B());
  EXPECT_NE(p.find("Draft graph:\nSydney | capital of | Australia\n"
                   "Retrieved facts:\n"
                   "Australia | capital | Canberra\n"
                   "Australia | currency | Australian dollar\n"
                   "Sydney | country | Australia\n"
                   "Sydney | population | 5 million\n"),
            std::string::npos)
      << p;
  EXPECT_TRUE(p.ends_with(B().verification_task + "\nFixed graph:\n"));
}

TEST(Verification, ConfidenceTieGoesToLabel) {
  Graph pseudo;
  pseudo.add(Triple("x", "r", "y"));
  Graph gt(Stage::kGroundTruth);
  gt.add(Triple("b", "r", "1"));
  gt.add(Triple("a", "r", "1"));
  std::vector<EntityConfidence> conf = {{"b", 0.8, 1}, {"a", 0.8, 1}};
  std::string p = build_verification_prompt(pseudo, gt, conf, B());
  EXPECT_LT(p.find("a | r | 1"), p.find("b | r | 1"));
}

TEST(Verification, EmptyGroundTruthAndMissingConfidence) {
  Graph pseudo;
  pseudo.add(Triple("x", "r", "y"));
  std::string p = build_verification_prompt(pseudo, Graph{}, {}, B());
  EXPECT_NE(p.find("Retrieved facts:\n" + std::string(kNoRetrievedFacts)), std::string::npos);
  Graph gt;
  gt.add(Triple("z", "r", "1"));
  EXPECT_THROW(build_verification_prompt(pseudo, gt, {}, B()), ContractError);
}

TEST(ExtractFinalAnswer, LastMarkerWins) {
  EXPECT_EQ(extract_final_answer("Reasoning. Answer: Paris"), "Paris");
  EXPECT_EQ(extract_final_answer("answer: no\nso the ANSWER:  Rome \n"), "Rome");
  EXPECT_EQ(extract_final_answer("  just text "), "just text");
  EXPECT_EQ(extract_final_answer("Answer:"), "");
}
