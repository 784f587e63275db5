// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors
//
// The question-answering pipeline: draft a pseudo-graph with the LLM, ground
// it against the semantic index, prune, let the LLM verify the draft against
// the grounded facts, and answer from the fixed graph.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "pgakv/embedding.hpp"
#include "pgakv/graph.hpp"
#include "pgakv/index.hpp"
#include "pgakv/llm.hpp"
#include "pgakv/prompts.hpp"
#include "pgakv/pruning.hpp"

namespace pgakv {

class GenerationFailure : public Error {
 public:
  explicit GenerationFailure(std::vector<std::string> errors)
      : Error("pseudo-graph generation failed after " + std::to_string(errors.size()) +
              " attempt(s): " + (errors.empty() ? std::string() : errors.back())),
        errors_(std::move(errors)) {}

  std::size_t attempts() const noexcept { return errors_.size(); }
  const std::string& last_error() const { return errors_.back(); }
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct StageParams {
  LlmParams pseudo_graph{0.0, 512, std::nullopt};
  LlmParams verification{0.0, 512, std::nullopt};
  LlmParams answer{0.0, 256, std::nullopt};
};

struct PipelineConfig {
  std::size_t top_k = kDefaultRetrievalTopK;
  PruneConfig prune;
  std::size_t max_retries = 2;
  StageParams params;
};

void to_json(nlohmann::json& j, const PipelineConfig& cfg);

struct PseudoGraphResult {
  Graph graph{Stage::kPseudo};
  std::size_t retries = 0;
  std::vector<std::string> errors;  // one per failed attempt
};

/// Throws GenerationFailure once 1 + max_retries attempts have all failed to
/// parse or decode (or decoded to an empty graph).
PseudoGraphResult generate_pseudo_graph(const std::string& question, LlmClient& llm,
                                        const PromptBundle& bundle,
                                        std::size_t max_retries = 2,
                                        const LlmParams& params = {});

struct VerificationResult {
  Graph fixed{Stage::kFixed};
  std::size_t retries = 0;
  bool fallback = false;  // true when fixed = merge(ground_truth, pseudo)
};

VerificationResult verify(const Graph& pseudo, const Graph& ground_truth,
                          std::span<const EntityConfidence> confidences, LlmClient& llm,
                          const PromptBundle& bundle, const LlmParams& params = {});

/// The LLM's reply, trimmed.
std::string answer(const std::string& question, const Graph& fixed, LlmClient& llm,
                   const PromptBundle& bundle, const LlmParams& params = {});

struct Trace {
  std::string question;
  bool degraded = false;
  Graph pseudo{Stage::kPseudo};
  std::vector<std::string> generation_errors;
  std::size_t generation_retries = 0;
  std::vector<ScoredTriple> temp;
  Graph ground_truth{Stage::kGroundTruth};
  std::vector<EntityConfidence> confidences;
  Graph fixed{Stage::kFixed};
  std::size_t verification_retries = 0;
  bool verification_fallback = false;
  std::vector<std::string> warnings;
  std::size_t llm_calls = 0;
  std::string answer;

  std::size_t retries() const noexcept { return generation_retries + verification_retries; }
};

nlohmann::json to_json(const Trace& trace);

struct Providers {
  EmbeddingProvider& embedder;
  LlmClient& llm;
};

struct PipelineResult {
  std::string answer;
  Trace trace;
};

/// Runs every stage. When the pseudo-graph cannot be generated the question
/// is answered with the plain IO prompt and the trace is marked degraded.
/// Transport, provider and stale-index errors propagate.
PipelineResult run_pipeline(const std::string& question, const TripleIndex& index,
                            Providers providers, const PipelineConfig& cfg = {},
                            const PromptBundle& bundle = PromptBundle::defaults());

}  // namespace pgakv
