// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors
//
// Prompt templates for every LLM call the pipeline and the baselines make.
// Builders are pure: equal inputs give byte-identical prompts, which is what
// keeps cassette digests stable.

#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>

#include "pgakv/graph.hpp"
#include "pgakv/pruning.hpp"

namespace pgakv {

struct CypherExample {
  std::string question;
  std::string cypher;
};

struct VerificationExample {
  std::string pseudo_graph;     // line format
  std::string retrieved_facts;  // line format
  std::string fixed_graph;      // line format
};

struct AnswerExample {
  std::string facts;  // line format
  std::string question;
  std::string answer;
};

struct QaExample {
  std::string question;
  std::string answer;
};

struct CotExample {
  std::string question;
  std::string reasoning;
  std::string answer;
};

/// Fixed-size few-shot sets: two examples per pipeline stage, six for the IO
/// and chain-of-thought baselines.
struct PromptBundle {
  std::string pseudo_graph_instructions;
  std::array<CypherExample, 2> pseudo_graph_examples;

  std::string verification_instructions;
  std::array<VerificationExample, 2> verification_examples;
  std::string verification_task;

  std::string answer_instructions;
  std::array<AnswerExample, 2> answer_examples;

  std::string io_instructions;
  std::array<QaExample, 6> io_examples;

  std::string cot_instructions;
  std::array<CotExample, 6> cot_examples;

  static const PromptBundle& defaults();
};

inline constexpr std::string_view kNoVerifiedFacts = "(no verified facts)";
inline constexpr std::string_view kNoRetrievedFacts = "(no retrieved facts)";

std::string build_pseudo_graph_prompt(std::string_view question, const PromptBundle& bundle);

/// The generation prompt plus the parse error of the previous attempt.
std::string build_pseudo_graph_retry_prompt(std::string_view question,
                                            std::string_view previous_output,
                                            std::string_view error,
                                            const PromptBundle& bundle);

/// Layout: instructions, examples, the pseudo-graph block, then the
/// ground-truth triples grouped by subject with the most confident group
/// first (adjacent to the pseudo-graph), then the task line. Throws
/// ContractError if a ground-truth subject has no confidence entry.
std::string build_verification_prompt(const Graph& pseudo, const Graph& ground_truth,
                                      std::span<const EntityConfidence> confidences,
                                      const PromptBundle& bundle);

/// Sent when the first verification reply held no triple lines.
std::string build_verification_retry_prompt(std::string_view base_prompt,
                                            std::string_view previous_output);

/// Empty `facts` renders as kNoVerifiedFacts.
std::string build_answer_prompt(std::string_view question, const Graph& facts,
                                const PromptBundle& bundle);

std::string build_io_prompt(std::string_view question, const PromptBundle& bundle);
std::string build_cot_prompt(std::string_view question, const PromptBundle& bundle);

/// Text after the last "Answer:" marker, trimmed; the whole reply if there
/// is none.
std::string extract_final_answer(std::string_view reply);

}  // namespace pgakv
