// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pgakv/embedding.hpp"
#include "pgakv/index.hpp"
#include "pgakv/llm.hpp"
#include "pgakv/pipeline.hpp"
#include "pgakv/prompts.hpp"

namespace pgakv {

class DatasetError : public Error {
 public:
  DatasetError(std::size_t record, const std::string& what)
      : Error("record " + std::to_string(record) + ": " + what), record_(record) {}
  std::size_t record() const noexcept { return record_; }

 private:
  std::size_t record_;
};

enum class DatasetFormat { kSimpleQuestions, kQald10, kNature };
enum class Strategy { kPgakv, kIo, kCot, kSc, kRag };
enum class Metric { kHitAt1, kRougeL };

std::optional<DatasetFormat> parse_dataset_format(std::string_view s);
std::optional<Strategy> parse_strategy(std::string_view s);
std::string_view to_string(DatasetFormat f) noexcept;
std::string_view to_string(Strategy s) noexcept;
std::string_view to_string(Metric m) noexcept;

/// Hit@1 for the precise-answer sets, ROUGE-L F1 for open-ended ones.
Metric metric_for(DatasetFormat f) noexcept;

struct QaItem {
  std::string id;
  std::string question;
  std::vector<std::string> gold;
};

/// JSON lines: {"id", "question", "answers": [...]}; for qald10 "question" is
/// a language -> text map and only "en" is kept. Blank lines are skipped.
/// Throws DatasetError naming the 1-based record index.
std::vector<QaItem> load_dataset(std::istream& in, DatasetFormat format);

/// `n` items picked by a seeded Fisher-Yates draw over mt19937_64, returned
/// in dataset order. n >= items.size() returns everything.
std::vector<QaItem> sample_subset(std::span<const QaItem> items, std::size_t n,
                                  std::uint64_t seed);

// --- metrics -------------------------------------------------------------

/// Lowercase (ASCII), punctuation removed, whitespace collapsed and trimmed.
std::string normalize_answer(std::string_view text);

/// 1 iff some non-empty normalized alias occurs in the normalized answer.
int hit_at_1(std::string_view answer, std::span<const std::string> gold);

std::vector<std::string> rouge_tokens(std::string_view text);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// Max over references of the LCS F-measure. An empty candidate scores 0 and
/// sets *empty_candidate when given.
double rouge_l_f1(std::string_view candidate, std::span<const std::string> references,
                  bool* empty_candidate = nullptr);

// --- harness -------------------------------------------------------------

struct EvalDeps {
  LlmClient& llm;
  EmbeddingProvider* embedder = nullptr;  // pgakv, rag
  const TripleIndex* index = nullptr;     // pgakv, rag
  const PromptBundle& bundle = PromptBundle::defaults();
};

struct EvalConfig {
  Metric metric = Metric::kHitAt1;
  PipelineConfig pipeline;
  std::size_t concurrency = 1;
  std::size_t sc_samples = 3;
  double sc_temperature = 0.7;
  std::size_t rag_top_k = kDefaultRetrievalTopK;
};

void to_json(nlohmann::json& j, const EvalConfig& cfg);

struct ItemRecord {
  std::string id;
  std::string question;
  std::string answer;
  double score = 0.0;
  std::optional<std::string> error;
  bool replay_miss = false;
  bool degraded = false;
  std::size_t llm_calls = 0;
  // pgakv only: generation attempts and how many parsed.
  std::size_t generation_attempts = 0;
  std::size_t valid_generations = 0;
  nlohmann::json trace_summary;
};

struct EvalAggregate {
  std::string metric;
  double mean = 0.0;
  std::size_t count = 0;
  std::size_t degraded_count = 0;
  std::size_t error_count = 0;
  std::optional<double> pseudo_graph_validity_rate;  // pgakv only
};

struct EvalReport {
  Strategy strategy = Strategy::kIo;
  Metric metric = Metric::kHitAt1;
  std::vector<ItemRecord> items;
  EvalAggregate aggregate;
  nlohmann::json config;  // effective configuration, echoed verbatim
};

/// Throws ContractError on an empty item list or missing strategy
/// dependencies. Per-item failures are recorded with score 0. Records come
/// back in dataset order whatever the completion order.
EvalReport run_eval(std::span<const QaItem> items, Strategy strategy, const EvalDeps& deps,
                    const EvalConfig& cfg);

/// Recomputes the aggregate from the item records.
EvalAggregate aggregate(std::span<const ItemRecord> items, Metric metric, Strategy strategy);

nlohmann::json to_json(const EvalReport& report);
std::string format_table(const EvalReport& report);

}  // namespace pgakv
