// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors
//
// pgakv index | ask | eval

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <utility>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "pgakv/config.hpp"
#include "pgakv/cypher.hpp"
#include "pgakv/embedding.hpp"
#include "pgakv/eval.hpp"
#include "pgakv/graph.hpp"
#include "pgakv/index.hpp"
#include "pgakv/llm.hpp"
#include "pgakv/pipeline.hpp"

namespace {

using namespace pgakv;

constexpr int kExitInput = 2;
constexpr int kExitReplayMiss = 3;
constexpr int kExitUsage = 64;

// Input problems the operator can fix by changing a file or flag.
class InputError : public Error {
 public:
  using Error::Error;
};

struct CommonFlags {
  std::string config_path;
  Settings flags;
  bool replay = false;
  bool record = false;
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "flat key = value config file");
  static const std::pair<const char*, const char*> kOptions[] = {
      {"kg", "triple file, tab-separated subject/relation/object"},
      {"index", "index cache path"},
      {"provider", "builtin-hash or an embedding endpoint URL"},
      {"llm-url", "chat-completions base URL"},
      {"model", "LLM model name"},
      {"cassette", "cassette file for --replay/--record"},
      {"threshold", "entity confidence threshold (default 0.7)"},
      {"topk", "triples retrieved per probe (default 10)"},
      {"concurrency", "items evaluated in parallel"},
      {"seed", "seed for --subset"},
      {"max-retries", "pseudo-graph regeneration attempts (default 2)"},
  };
  for (const auto& [key, help] : kOptions) {
    std::string name = std::string("--") + key;
    cmd->add_option_function<std::string>(
        name, [&f, k = std::string(key)](const std::string& v) { f.flags[k] = v; }, help);
  }
  auto* replay = cmd->add_flag("--replay", f.replay, "answer only from the cassette");
  auto* record = cmd->add_flag("--record", f.record, "forward misses to the LLM and record");
  replay->excludes(record);
  cmd->add_flag("-v,--verbose", f.verbose, "log progress to stderr");
}

AppConfig resolve_config(CommonFlags& f) {
  AppConfig cfg;
  std::string file = f.config_path;
  if (file.empty()) {
    if (const char* p = std::getenv("PGAKV_CONFIG"); p != nullptr) file = p;
  }
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw InputError("cannot open config file " + file);
    apply(cfg, parse_config_file(in), "config file " + file);
  }
  apply(cfg, settings_from_env([](const char* n) { return std::getenv(n); }), "environment");
  if (f.replay) f.flags["mode"] = "replay";
  if (f.record) f.flags["mode"] = "record";
  apply(cfg, f.flags, "command line");
  return cfg;
}

void require_file(const std::string& path, std::string_view what) {
  if (path.empty()) throw InputError(std::string(what) + " path not set");
  if (!std::filesystem::is_regular_file(path)) {
    throw InputError(std::string(what) + " not found: " + path);
  }
}

std::unique_ptr<EmbeddingProvider> make_provider(const AppConfig& cfg) {
  if (cfg.provider == "builtin-hash") return std::make_unique<HashingEmbedder>();
  if (cfg.provider.starts_with("http://") || cfg.provider.starts_with("https://")) {
    return std::make_unique<RemoteEmbedder>(cfg.provider);
  }
  throw InputError("provider must be builtin-hash or an http(s) URL, got '" + cfg.provider +
                   "'");
}

Graph read_kg(const std::string& path) {
  require_file(path, "KG file");
  std::ifstream in(path, std::ios::binary);
  try {
    return parse_triple_file(in);
  } catch (const ParseError& e) {
    throw InputError(path + ": " + e.what());
  } catch (const EncodingError& e) {
    throw InputError(path + ": " + e.what());
  }
}

TripleIndex open_index(const AppConfig& cfg, EmbeddingProvider& provider) {
  if (!cfg.index.empty() && std::filesystem::is_regular_file(cfg.index)) {
    std::ifstream in(cfg.index, std::ios::binary);
    try {
      return TripleIndex::load(in, provider.fingerprint());
    } catch (const StaleIndexError& e) {
      throw InputError(cfg.index + ": " + e.what() + " (rebuild with `pgakv index`)");
    } catch (const ParseError& e) {
      throw InputError(cfg.index + ": " + e.what());
    }
  }
  if (!cfg.kg.empty()) {
    spdlog::info("no index cache, embedding {} in memory", cfg.kg);
    return build_index(read_kg(cfg.kg), provider);
  }
  require_file(cfg.index, "index cache");
  throw InputError("no index");  // unreachable
}

// Owns whatever stack of clients the cassette mode calls for.
struct LlmStack {
  std::optional<Cassette> cassette;
  std::unique_ptr<HttpLlmClient> http;
  std::unique_ptr<CassetteClient> cassette_client;
  LlmClient* client = nullptr;
  bool save_on_exit = false;
  std::string cassette_path;

  void save() const {
    if (save_on_exit && cassette) cassette->save_file(cassette_path);
  }
};

std::unique_ptr<HttpLlmClient> make_http(const AppConfig& cfg) {
  if (cfg.llm_url.empty() || cfg.model.empty()) {
    throw InputError("a live LLM needs --llm-url and --model");
  }
  HttpLlmConfig h;
  h.base_url = cfg.llm_url;
  h.model = cfg.model;
  if (const char* key = std::getenv("PGAKV_API_KEY"); key != nullptr) h.api_key = key;
  h.max_in_flight = cfg.concurrency;
  return std::make_unique<HttpLlmClient>(h);
}

void build_llm(const AppConfig& cfg, LlmStack& s) {
  if (cfg.mode == CassetteModeSetting::kNone) {
    if (!cfg.cassette.empty()) throw InputError("--cassette needs --replay or --record");
    s.http = make_http(cfg);
    s.client = s.http.get();
    return;
  }
  if (cfg.cassette.empty()) throw InputError("--replay/--record need --cassette");
  s.cassette_path = cfg.cassette;
  if (cfg.mode == CassetteModeSetting::kReplay) {
    require_file(cfg.cassette, "cassette");
    s.cassette.emplace(Cassette::load_file(cfg.cassette));
    s.cassette_client =
        std::make_unique<CassetteClient>(*s.cassette, CassetteMode::kReplay);
  } else {
    if (std::filesystem::is_regular_file(cfg.cassette)) {
      s.cassette.emplace(Cassette::load_file(cfg.cassette));
    } else {
      s.cassette.emplace();
    }
    s.http = make_http(cfg);
    s.cassette_client =
        std::make_unique<CassetteClient>(*s.cassette, CassetteMode::kRecord, s.http.get());
    s.save_on_exit = true;
  }
  s.client = s.cassette_client.get();
}

PipelineConfig pipeline_config(const AppConfig& cfg) {
  PipelineConfig p;
  p.top_k = cfg.topk;
  p.prune.confidence_threshold = cfg.threshold;
  p.max_retries = cfg.max_retries;
  return p;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << '\n';
}

int cmd_index(const AppConfig& cfg) {
  if (cfg.index.empty()) throw InputError("--index output path not set");
  Graph g = read_kg(cfg.kg);
  auto provider = make_provider(cfg);
  TripleIndex index = build_index(g, *provider);
  std::ofstream out(cfg.index, std::ios::binary);
  if (!out) throw InputError("cannot write " + cfg.index);
  index.save(out);
  std::cout << "indexed " << index.size() << " triples, dimension " << index.dimension()
            << ", provider " << index.fingerprint() << '\n';
  return 0;
}

int cmd_ask(const AppConfig& cfg, const std::string& question, const std::string& trace_path) {
  auto provider = make_provider(cfg);
  TripleIndex index = open_index(cfg, *provider);
  LlmStack llm;
  build_llm(cfg, llm);
  PipelineResult result;
  try {
    result = run_pipeline(question, index, {*provider, *llm.client}, pipeline_config(cfg));
  } catch (...) {
    llm.save();
    throw;
  }
  llm.save();
  if (!trace_path.empty()) {
    auto j = to_json(result.trace);
    j["config"] = to_json(cfg);
    write_json(trace_path, j);
  }
  std::cout << result.answer << '\n';
  if (result.trace.degraded) {
    std::cout << "note: degraded run, pseudo-graph generation failed; answered without the "
                 "knowledge graph\n";
  }
  return 0;
}

struct EvalArgs {
  std::string dataset;
  std::string format;
  std::string strategy;
  std::string out;
  std::size_t subset = 0;
};

int cmd_eval(const AppConfig& cfg, const EvalArgs& a) {
  auto format = parse_dataset_format(a.format).value();
  auto strategy = parse_strategy(a.strategy).value();
  require_file(a.dataset, "dataset");
  std::vector<QaItem> items;
  {
    std::ifstream in(a.dataset, std::ios::binary);
    try {
      items = load_dataset(in, format);
    } catch (const DatasetError& e) {
      throw InputError(a.dataset + ": " + e.what());
    }
  }
  if (a.subset > 0) items = sample_subset(items, a.subset, cfg.seed);
  if (items.empty()) throw InputError(a.dataset + ": no records");

  std::unique_ptr<EmbeddingProvider> provider;
  std::optional<TripleIndex> index;
  if (strategy == Strategy::kPgakv || strategy == Strategy::kRag) {
    provider = make_provider(cfg);
    index.emplace(open_index(cfg, *provider));
  }
  LlmStack llm;
  build_llm(cfg, llm);

  EvalConfig ec;
  ec.metric = metric_for(format);
  ec.pipeline = pipeline_config(cfg);
  ec.concurrency = cfg.concurrency;
  ec.rag_top_k = cfg.topk;
  EvalDeps deps{*llm.client, provider.get(), index ? &*index : nullptr};
  EvalReport report = run_eval(items, strategy, deps, ec);
  llm.save();

  auto j = to_json(report);
  j["config"]["app"] = to_json(cfg);
  j["config"]["dataset"] = {{"format", to_string(format)}, {"subset", a.subset}};
  if (!a.out.empty()) write_json(a.out, j);
  std::cout << format_table(report);

  for (const auto& r : report.items) {
    if (r.replay_miss) {
      std::cerr << "error: replay miss on item " << r.id << ": " << *r.error << '\n';
      return kExitReplayMiss;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_logger_mt("pgakv");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);

  CLI::App app{"Pseudo-graph question answering over a knowledge graph"};
  app.require_subcommand(1);

  CommonFlags common;
  auto* index_cmd = app.add_subcommand("index", "embed a KG file into an index cache");
  add_common(index_cmd, common);

  std::string question, trace_path;
  auto* ask_cmd = app.add_subcommand("ask", "answer one question");
  add_common(ask_cmd, common);
  ask_cmd->add_option("question", question, "the question")->required();
  ask_cmd->add_option("--trace", trace_path, "write the pipeline trace JSON here");

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "score a strategy on a dataset");
  add_common(eval_cmd, common);
  eval_cmd->add_option("--dataset", ea.dataset, "JSON-lines dataset")->required();
  eval_cmd->add_option("--format", ea.format, "dataset format")
      ->required()
      ->check(CLI::IsMember({"simplequestions", "qald10", "nature"}));
  eval_cmd->add_option("--strategy", ea.strategy, "answering strategy")
      ->required()
      ->check(CLI::IsMember({"pgakv", "io", "cot", "sc", "rag"}));
  eval_cmd->add_option("--out", ea.out, "write the JSON report here");
  eval_cmd->add_option("--subset", ea.subset, "evaluate a seeded random subset of this size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (common.verbose) spdlog::set_level(spdlog::level::info);

  try {
    AppConfig cfg = resolve_config(common);
    if (*index_cmd) return cmd_index(cfg);
    if (*ask_cmd) return cmd_ask(cfg, question, trace_path);
    return cmd_eval(cfg, ea);
  } catch (const ReplayMissError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitReplayMiss;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
