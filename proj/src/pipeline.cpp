// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors

#include "pgakv/pipeline.hpp"

#include <spdlog/spdlog.h>

#include "pgakv/cypher.hpp"

namespace pgakv {

namespace {

nlohmann::json triple_json(const Triple& t) {
  return nlohmann::json::array({t.subject(), t.relation(), t.object()});
}

nlohmann::json graph_json(const Graph& g) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : g) out.push_back(triple_json(t));
  return out;
}

}  // namespace

void to_json(nlohmann::json& j, const PipelineConfig& cfg) {
  j = nlohmann::json{
      {"top_k", cfg.top_k},
      {"confidence_threshold", cfg.prune.confidence_threshold},
      {"k_override", cfg.prune.k_override ? nlohmann::json(*cfg.prune.k_override)
                                          : nlohmann::json(nullptr)},
      {"max_retries", cfg.max_retries},
      {"params",
       {{"pseudo_graph", cfg.params.pseudo_graph},
        {"verification", cfg.params.verification},
        {"answer", cfg.params.answer}}},
  };
}

PseudoGraphResult generate_pseudo_graph(const std::string& question, LlmClient& llm,
                                        const PromptBundle& bundle,
                                        std::size_t max_retries, const LlmParams& params) {
  if (trim(question).empty()) throw ContractError("question is empty");
  PseudoGraphResult result;
  std::string prompt = build_pseudo_graph_prompt(question, bundle);
  for (std::size_t attempt = 0; attempt <= max_retries; ++attempt) {
    std::string reply = llm.complete(prompt, params);
    try {
      Graph g = cypher::execute(cypher::parse_cypher(cypher::extract_code(reply)));
      if (g.empty()) throw cypher::DecodeError("script contains no relationships");
      result.graph = std::move(g);
      result.retries = attempt;
      return result;
    } catch (const cypher::CypherError& e) {
      result.errors.emplace_back(e.what());
    } catch (const cypher::DecodeError& e) {
      result.errors.emplace_back(e.what());
    }
    spdlog::debug("pseudo-graph attempt {} rejected: {}", attempt + 1, result.errors.back());
    prompt = build_pseudo_graph_retry_prompt(question, reply, result.errors.back(), bundle);
  }
  throw GenerationFailure(std::move(result.errors));
}

VerificationResult verify(const Graph& pseudo, const Graph& ground_truth,
                          std::span<const EntityConfidence> confidences, LlmClient& llm,
                          const PromptBundle& bundle, const LlmParams& params) {
  if (pseudo.empty()) throw ContractError("verification needs a non-empty pseudo-graph");
  VerificationResult result;
  std::string prompt = build_verification_prompt(pseudo, ground_truth, confidences, bundle);
  std::string reply = llm.complete(prompt, params);
  result.fixed = parse_line_format(reply, Stage::kFixed);
  if (!result.fixed.empty()) return result;

  result.retries = 1;
  reply = llm.complete(build_verification_retry_prompt(prompt, reply), params);
  result.fixed = parse_line_format(reply, Stage::kFixed);
  if (!result.fixed.empty()) return result;

  spdlog::warn("verification output unparseable twice; using retrieved facts + draft");
  result.fallback = true;
  result.fixed = merge(ground_truth, pseudo);
  result.fixed.set_stage(Stage::kFixed);
  return result;
}

std::string answer(const std::string& question, const Graph& fixed, LlmClient& llm,
                   const PromptBundle& bundle, const LlmParams& params) {
  return std::string(trim(llm.complete(build_answer_prompt(question, fixed, bundle), params)));
}

nlohmann::json to_json(const Trace& t) {
  nlohmann::json temp = nlohmann::json::array();
  for (const auto& st : t.temp) {
    temp.push_back({{"triple", triple_json(st.triple)}, {"score", st.score}});
  }
  nlohmann::json conf = nlohmann::json::array();
  for (const auto& c : t.confidences) {
    conf.push_back(
        {{"subject", c.subject}, {"confidence", c.confidence}, {"support", c.support}});
  }
  return nlohmann::json{
      {"question", t.question},
      {"degraded", t.degraded},
      {"pseudo_graph", graph_json(t.pseudo)},
      {"generation", {{"retries", t.generation_retries}, {"errors", t.generation_errors}}},
      {"temp_graph", {{"size", t.temp.size()}, {"triples", temp}}},
      {"ground_truth_graph", graph_json(t.ground_truth)},
      {"confidences", conf},
      {"fixed_graph", graph_json(t.fixed)},
      {"verification",
       {{"retries", t.verification_retries}, {"fallback", t.verification_fallback}}},
      {"retries", t.retries()},
      {"llm_calls", t.llm_calls},
      {"warnings", t.warnings},
      {"answer", t.answer},
  };
}

PipelineResult run_pipeline(const std::string& question, const TripleIndex& index,
                            Providers providers, const PipelineConfig& cfg,
                            const PromptBundle& bundle) {
  CallLog llm(providers.llm);
  Trace trace;
  trace.question = question;

  try {
    auto pg = generate_pseudo_graph(question, llm, bundle, cfg.max_retries,
                                    cfg.params.pseudo_graph);
    trace.pseudo = std::move(pg.graph);
    trace.generation_retries = pg.retries;
    trace.generation_errors = std::move(pg.errors);
  } catch (const GenerationFailure& e) {
    trace.degraded = true;
    trace.generation_errors = e.errors();
    trace.generation_retries = e.attempts() - 1;
    trace.warnings.push_back("pseudo-graph generation failed; answered without the knowledge graph");
    trace.answer = std::string(
        trim(llm.complete(build_io_prompt(question, bundle), cfg.params.answer)));
    trace.llm_calls = llm.count();
    return {trace.answer, std::move(trace)};
  }

  trace.temp = build_temp_graph(index, trace.pseudo, providers.embedder, cfg.top_k);
  PruneResult pruned = prune(trace.temp, trace.pseudo, cfg.prune);
  trace.ground_truth = std::move(pruned.ground_truth);
  trace.confidences = std::move(pruned.confidences);

  VerificationResult verified = verify(trace.pseudo, trace.ground_truth, trace.confidences,
                                       llm, bundle, cfg.params.verification);
  trace.fixed = std::move(verified.fixed);
  trace.verification_retries = verified.retries;
  trace.verification_fallback = verified.fallback;
  if (verified.fallback) {
    trace.warnings.push_back("verification output unparseable; fixed graph is retrieved facts plus draft");
  }

  trace.answer = answer(question, trace.fixed, llm, bundle, cfg.params.answer);
  trace.llm_calls = llm.count();
  return {trace.answer, std::move(trace)};
}

}  // namespace pgakv
