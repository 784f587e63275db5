// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors

#include "pgakv/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <map>
#include <numeric>
#include <random>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace pgakv {

std::optional<DatasetFormat> parse_dataset_format(std::string_view s) {
  if (s == "simplequestions") return DatasetFormat::kSimpleQuestions;
  if (s == "qald10") return DatasetFormat::kQald10;
  if (s == "nature") return DatasetFormat::kNature;
  return std::nullopt;
}

std::optional<Strategy> parse_strategy(std::string_view s) {
  if (s == "pgakv") return Strategy::kPgakv;
  if (s == "io") return Strategy::kIo;
  if (s == "cot") return Strategy::kCot;
  if (s == "sc") return Strategy::kSc;
  if (s == "rag") return Strategy::kRag;
  return std::nullopt;
}

std::string_view to_string(DatasetFormat f) noexcept {
  switch (f) {
    case DatasetFormat::kSimpleQuestions: return "simplequestions";
    case DatasetFormat::kQald10: return "qald10";
    case DatasetFormat::kNature: return "nature";
  }
  return "?";
}

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::kPgakv: return "pgakv";
    case Strategy::kIo: return "io";
    case Strategy::kCot: return "cot";
    case Strategy::kSc: return "sc";
    case Strategy::kRag: return "rag";
  }
  return "?";
}

std::string_view to_string(Metric m) noexcept {
  return m == Metric::kHitAt1 ? "hit@1" : "rouge-l-f1";
}

Metric metric_for(DatasetFormat f) noexcept {
  return f == DatasetFormat::kNature ? Metric::kRougeL : Metric::kHitAt1;
}

// --- datasets ------------------------------------------------------------

namespace {

std::string english_question(const nlohmann::json& q) {
  if (q.is_object()) {
    if (!q.contains("en")) throw Error("question has no \"en\" entry");
    return q.at("en").get<std::string>();
  }
  // QALD's native layout: [{"language": "en", "string": "..."}]
  if (q.is_array()) {
    for (const auto& entry : q) {
      if (entry.value("language", "") == "en") return entry.at("string").get<std::string>();
    }
    throw Error("question has no \"en\" entry");
  }
  throw Error("qald10 question must be a language map");
}

}  // namespace

std::vector<QaItem> load_dataset(std::istream& in, DatasetFormat format) {
  std::vector<QaItem> items;
  std::string line;
  std::size_t record = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++record;
    try {
      auto j = nlohmann::json::parse(line);
      if (!j.is_object()) throw Error("record is not a JSON object");
      QaItem item;
      const auto& id = j.at("id");
      item.id = id.is_string() ? id.get<std::string>() : id.dump();
      const auto& q = j.at("question");
      item.question = format == DatasetFormat::kQald10 ? english_question(q)
                                                       : q.get<std::string>();
      item.question = std::string(trim(item.question));
      if (item.question.empty()) throw Error("empty question");
      item.gold = j.at("answers").get<std::vector<std::string>>();
      if (item.gold.empty()) throw Error("no gold answers");
      items.push_back(std::move(item));
    } catch (const DatasetError&) {
      throw;
    } catch (const std::exception& e) {
      throw DatasetError(record, e.what());
    }
  }
  return items;
}

std::vector<QaItem> sample_subset(std::span<const QaItem> items, std::size_t n,
                                  std::uint64_t seed) {
  if (n >= items.size()) return {items.begin(), items.end()};
  std::vector<std::size_t> idx(items.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Modulo draw rather than uniform_int_distribution: the standard leaves
  // distributions implementation-defined, the engine is fully specified.
  std::mt19937_64 rng(seed);
  for (std::size_t i = idx.size() - 1; i > 0; --i) {
    std::swap(idx[i], idx[rng() % (i + 1)]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  std::vector<QaItem> out;
  for (auto i : idx) out.push_back(items[i]);
  return out;
}

// --- metrics -------------------------------------------------------------

std::string normalize_answer(std::string_view text) {
  std::string out;
  bool space = false;
  for (char c : text) {
    auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && std::ispunct(u)) continue;
    if (u < 0x80 && std::isspace(u)) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += u < 0x80 ? static_cast<char>(std::tolower(u)) : c;
  }
  return out;
}

int hit_at_1(std::string_view answer, std::span<const std::string> gold) {
  std::string a = normalize_answer(answer);
  for (const auto& g : gold) {
    std::string n = normalize_answer(g);
    if (!n.empty() && a.find(n) != std::string::npos) return 1;
  }
  return 0;
}

std::vector<std::string> rouge_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string norm = normalize_answer(text);
  std::size_t start = 0;
  while (start < norm.size()) {
    std::size_t end = norm.find(' ', start);
    if (end == std::string::npos) end = norm.size();
    out.push_back(norm.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l_f1(std::string_view candidate, std::span<const std::string> references,
                  bool* empty_candidate) {
  auto cand = rouge_tokens(candidate);
  if (empty_candidate) *empty_candidate = cand.empty();
  if (cand.empty()) {
    spdlog::warn("ROUGE-L: candidate has no tokens, scoring 0");
    return 0.0;
  }
  double best = 0.0;
  for (const auto& ref_text : references) {
    auto ref = rouge_tokens(ref_text);
    if (ref.empty()) continue;
    double lcs = static_cast<double>(lcs_length(cand, ref));
    double p = lcs / static_cast<double>(cand.size());
    double r = lcs / static_cast<double>(ref.size());
    double f = p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    best = std::max(best, f);
  }
  return best;
}

// --- harness -------------------------------------------------------------

void to_json(nlohmann::json& j, const EvalConfig& cfg) {
  j = nlohmann::json{{"metric", to_string(cfg.metric)},
                     {"pipeline", cfg.pipeline},
                     {"concurrency", cfg.concurrency},
                     {"sc_samples", cfg.sc_samples},
                     {"sc_temperature", cfg.sc_temperature},
                     {"rag_top_k", cfg.rag_top_k}};
}

namespace {

std::string self_consistency(const QaItem& item, LlmClient& llm, const EvalDeps& deps,
                             const EvalConfig& cfg) {
  std::string prompt = build_cot_prompt(item.question, deps.bundle);
  std::vector<std::string> answers, keys;
  for (std::size_t i = 0; i < cfg.sc_samples; ++i) {
    LlmParams p = cfg.pipeline.params.answer;
    p.temperature = cfg.sc_temperature;
    p.seed = static_cast<std::int64_t>(i);
    answers.push_back(extract_final_answer(llm.complete(prompt, p)));
    keys.push_back(normalize_answer(answers.back()));
  }
  std::size_t best = 0, best_votes = 0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    auto votes = static_cast<std::size_t>(std::count(keys.begin(), keys.end(), keys[i]));
    if (votes > best_votes) {  // strict: earlier sample wins ties
      best = i;
      best_votes = votes;
    }
  }
  return answers.empty() ? std::string() : answers[best];
}

ItemRecord run_item(const QaItem& item, Strategy strategy, const EvalDeps& deps,
                    const EvalConfig& cfg) {
  ItemRecord rec;
  rec.id = item.id;
  rec.question = item.question;
  CallLog llm(deps.llm);
  try {
    switch (strategy) {
      case Strategy::kPgakv: {
        auto result = run_pipeline(item.question, *deps.index, {*deps.embedder, llm},
                                   cfg.pipeline, deps.bundle);
        const Trace& t = result.trace;
        rec.answer = result.answer;
        rec.degraded = t.degraded;
        rec.generation_attempts = t.generation_retries + 1;
        rec.valid_generations = t.degraded ? 0 : 1;
        rec.trace_summary = {{"pseudo_graph_size", t.pseudo.size()},
                             {"temp_graph_size", t.temp.size()},
                             {"ground_truth_size", t.ground_truth.size()},
                             {"fixed_graph_size", t.fixed.size()},
                             {"retries", t.retries()},
                             {"verification_fallback", t.verification_fallback}};
        break;
      }
      case Strategy::kIo:
        rec.answer = std::string(trim(llm.complete(build_io_prompt(item.question, deps.bundle),
                                                   cfg.pipeline.params.answer)));
        break;
      case Strategy::kCot:
        rec.answer = extract_final_answer(llm.complete(
            build_cot_prompt(item.question, deps.bundle), cfg.pipeline.params.answer));
        break;
      case Strategy::kSc:
        rec.answer = self_consistency(item, llm, deps, cfg);
        break;
      case Strategy::kRag: {
        auto hits = query_text_top_k(*deps.index, item.question, *deps.embedder, cfg.rag_top_k);
        Graph evidence(Stage::kGroundTruth);
        for (const auto& h : hits) evidence.add(h.triple);
        rec.answer = answer(item.question, evidence, llm, deps.bundle, cfg.pipeline.params.answer);
        rec.trace_summary = {{"retrieved", evidence.size()}};
        break;
      }
    }
    rec.score = cfg.metric == Metric::kHitAt1 ? hit_at_1(rec.answer, item.gold)
                                              : rouge_l_f1(rec.answer, item.gold);
  } catch (const ReplayMissError& e) {
    rec.error = e.what();
    rec.replay_miss = true;
    rec.score = 0.0;
  } catch (const std::exception& e) {
    rec.error = e.what();
    rec.score = 0.0;
  }
  rec.llm_calls = llm.count();
  if (rec.error) spdlog::warn("item {} failed: {}", rec.id, *rec.error);
  return rec;
}

}  // namespace

EvalAggregate aggregate(std::span<const ItemRecord> items, Metric metric, Strategy strategy) {
  EvalAggregate agg;
  agg.metric = std::string(to_string(metric));
  agg.count = items.size();
  double sum = 0.0;
  std::size_t attempts = 0, valid = 0;
  for (const auto& r : items) {
    sum += r.score;
    agg.degraded_count += r.degraded ? 1 : 0;
    agg.error_count += r.error ? 1 : 0;
    attempts += r.generation_attempts;
    valid += r.valid_generations;
  }
  agg.mean = items.empty() ? 0.0 : sum / static_cast<double>(items.size());
  if (strategy == Strategy::kPgakv && attempts > 0) {
    agg.pseudo_graph_validity_rate = static_cast<double>(valid) / static_cast<double>(attempts);
  }
  return agg;
}

EvalReport run_eval(std::span<const QaItem> items, Strategy strategy, const EvalDeps& deps,
                    const EvalConfig& cfg) {
  if (items.empty()) throw ContractError("evaluation needs at least one item");
  if ((strategy == Strategy::kPgakv || strategy == Strategy::kRag) &&
      (deps.index == nullptr || deps.embedder == nullptr)) {
    throw ContractError(std::string(to_string(strategy)) +
                        " strategy needs an index and an embedding provider");
  }
  EvalReport report;
  report.strategy = strategy;
  report.metric = cfg.metric;
  report.config = cfg;
  report.items.resize(items.size());

  std::size_t workers = std::clamp<std::size_t>(cfg.concurrency, 1, items.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      report.items[i] = run_item(items[i], strategy, deps, cfg);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  report.aggregate = aggregate(report.items, cfg.metric, strategy);
  return report;
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& r : report.items) {
    items.push_back({{"id", r.id},
                     {"question", r.question},
                     {"answer", r.answer},
                     {"score", r.score},
                     {"error", r.error ? nlohmann::json(*r.error) : nlohmann::json(nullptr)},
                     {"degraded", r.degraded},
                     {"llm_calls", r.llm_calls},
                     {"trace", r.trace_summary}});
  }
  const auto& a = report.aggregate;
  return nlohmann::json{
      {"strategy", to_string(report.strategy)},
      {"metric", to_string(report.metric)},
      {"config", report.config},
      {"items", items},
      {"aggregate",
       {{"metric", a.metric},
        {"mean", a.mean},
        {"count", a.count},
        {"degraded_count", a.degraded_count},
        {"error_count", a.error_count},
        {"pseudo_graph_validity_rate", a.pseudo_graph_validity_rate
                                           ? nlohmann::json(*a.pseudo_graph_validity_rate)
                                           : nlohmann::json(nullptr)}}},
  };
}

std::string format_table(const EvalReport& report) {
  const auto& a = report.aggregate;
  std::string validity =
      a.pseudo_graph_validity_rate ? fmt::format("{:.4f}", *a.pseudo_graph_validity_rate) : "-";
  std::string out = fmt::format("{:<10} {:<11} {:>6} {:>8} {:>9} {:>7} {:>9}\n", "strategy",
                                "metric", "items", "mean", "degraded", "errors", "validity");
  out += fmt::format("{:<10} {:<11} {:>6} {:>8.4f} {:>9} {:>7} {:>9}\n",
                     to_string(report.strategy), a.metric, a.count, a.mean, a.degraded_count,
                     a.error_count, validity);
  return out;
}

}  // namespace pgakv
