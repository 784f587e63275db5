// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors
//
// Regenerates the toy index and cassettes under tests/fixtures from a
// scripted LLM. The script plays a model that drafts plausible but partly
// wrong graphs, fixes drafts mechanically from retrieved facts, and answers
// from whatever graph it is shown.
//
//   record_fixtures <fixtures-dir>

#include <fstream>
#include <iostream>
#include <map>

#include "pgakv/eval.hpp"
#include "pgakv/graph.hpp"
#include "pgakv/index.hpp"
#include "pgakv/llm.hpp"
#include "pgakv/pipeline.hpp"
#include "pgakv/prompts.hpp"

namespace {

using namespace pgakv;

struct Script {
  std::vector<std::string> drafts;  // reply per generation attempt, last one repeats
  bool verify_in_prose = false;
  std::string subject, relation;  // fact the answer is read from
  std::string answer_prefix;
  std::string parametric;              // answer with no graph in the prompt
  std::vector<std::string> sc_answers;  // per sampling seed
};

const std::string kProse = "I think the answer is well known, so no graph is needed here.";

std::map<std::string, Script> scripts() {
  std::map<std::string, Script> s;
  s["Where was Alan Turing born?"] = {
      {"```cypher\n"
       "CREATE (t:Person {name: \"Alan Turing\"})-[:PLACE_OF_BIRTH]->(m:City {name: \"Manchester\"})\n"
       "CREATE (t)-[:FIELD_OF_WORK]->(:Field {name: \"computer science\"})\n"
       "CREATE (t)-[:EDUCATED_AT]->(:University {name: \"King's College Cambridge\"})\n"
       "CREATE (t)-[:DATE_OF_BIRTH]->(:Year {name: \"1912\"})\n"
       "CREATE (t)-[:KNOWN_FOR]->(:Concept {name: \"Turing machine\"})\n```"},
      false, "Alan Turing", "place of birth", "Alan Turing was born in ",
      "Alan Turing was born in Manchester.",
      {"Manchester", "London", "Manchester"}};
  s["What is the capital of Australia?"] = {
      {"```cypher\n"
       "CREATE (a:Country {name: \"Australia\"})-[:CAPITAL]->(:City {name: \"Sydney\"}),\n"
       "       (a)-[:CONTINENT]->(:Continent {name: \"Oceania\"}),\n"
       "       (a)-[:OFFICIAL_LANGUAGE]->(:Language {name: \"English\"}),\n"
       "       (a)-[:CURRENCY]->(:Currency {name: \"Australian dollar\"}),\n"
       "       (a)-[:HIGHEST_POINT]->(:Mountain {name: \"Mount Kosciuszko\"})\n```"},
      false, "Australia", "capital", "The capital of Australia is ",
      "The capital of Australia is Sydney.",
      {"Sydney", "Canberra", "Canberra"}};
  s["Who designed the Python programming language?"] = {
      {"Python was designed by Guido van Rossum in the late 1980s.",
       "```cypher\n"
       "CREATE (p:Language {name: \"Python\"})-[:DESIGNED_BY]->(g:Person {name: \"Guido van Rossum\"})\n"
       "CREATE (p)-[:FIRST_RELEASED]->(:Year {name: \"1991\"})\n"
       "CREATE (p)-[:INSTANCE_OF]->(:Class {name: \"programming language\"})\n"
       "CREATE (p)-[:LICENSE]->(:License {name: \"Python Software Foundation License\"})\n"
       "CREATE (p)-[:INFLUENCED_BY]->(:Language {name: \"ABC\"})\n```"},
      false, "Python", "designed by", "Python was designed by ",
      "Guido van Rossum designed Python.",
      {"Guido van Rossum", "Guido van Rossum", "Guido van Rossum"}};
  s["Which prize did Alexander Fleming receive?"] = {
      {"```cypher\n"
       "CREATE (f:Person {name: \"Alexander Fleming\"})-[:AWARD_RECEIVED]->(:Award {name: \"Nobel Prize in Chemistry\"})\n"
       "CREATE (f)-[:KNOWN_FOR]->(:Drug {name: \"penicillin\"})\n"
       "CREATE (f)-[:PLACE_OF_BIRTH]->(:Town {name: \"Darvel\"})\n"
       "CREATE (f)-[:DATE_OF_BIRTH]->(:Year {name: \"1881\"})\n"
       "CREATE (f)-[:EDUCATED_AT]->(:School {name: \"St Mary's Hospital Medical School\"})\n```"},
      false, "Alexander Fleming", "award received", "Alexander Fleming received the ",
      "Alexander Fleming received the Nobel Prize in Chemistry.",
      {"Nobel Prize in Chemistry", "Nobel Prize in Physiology or Medicine", "Copley Medal"}};
  s["How high is Mount Everest?"] = {
      {"```cypher\n"
       "CREATE (e:Mountain {name: \"Mount Everest\"})-[:ELEVATION_ABOVE_SEA_LEVEL]->(:Height {name: \"8848 metres\"})\n"
       "CREATE (e)-[:COUNTRY]->(:Country {name: \"Nepal\"})\n"
       "CREATE (e)-[:MOUNTAIN_RANGE]->(:Range {name: \"Himalayas\"})\n"
       "CREATE (e)-[:FIRST_ASCENT]->(:Year {name: \"1953\"})\n"
       "CREATE (e)-[:INSTANCE_OF]->(:Class {name: \"mountain\"})\n```"},
      true, "Mount Everest", "elevation above sea level", "Mount Everest is ",
      "Mount Everest is 8848 metres high.",
      {"8848 metres", "8849 metres", "8848 metres"}};
  s["Who painted the Mona Lisa?"] = {
      {kProse}, false, "Leonardo da Vinci", "notable work", "",
      "Leonardo da Vinci painted the Mona Lisa.",
      {"Leonardo da Vinci", "Leonardo da Vinci", "Leonardo da Vinci"}};
  s["Why do leaves change colour in autumn?"] = {
      {kProse}, false, "", "", "",
      "Leaves lose their green chlorophyll in autumn, so yellow and red pigments show.",
      {}};
  s["How does a refrigerator keep food cold?"] = {
      {kProse}, false, "", "", "",
      "A compressor pumps refrigerant that moves heat from inside the fridge to the outside.",
      {}};
  s["What makes the sky look blue?"] = {
      {kProse}, false, "", "", "",
      "Sunlight is scattered by the air and blue light scatters the most.",
      {}};
  return s;
}

std::string last_line_after(const std::string& text, const std::string& marker) {
  auto pos = text.rfind(marker);
  if (pos == std::string::npos) throw Error("scripted LLM: no '" + marker + "' in prompt");
  pos += marker.size();
  return text.substr(pos, text.find('\n', pos) - pos);
}

// Text between the last occurrence of `open` and the next `close`.
std::string last_block(const std::string& text, const std::string& open, const std::string& close) {
  auto pos = text.rfind(open);
  if (pos == std::string::npos) throw Error("scripted LLM: no '" + open + "' in prompt");
  pos += open.size();
  return text.substr(pos, text.find(close, pos) - pos);
}

class ScriptedLlm {
 public:
  std::string operator()(const std::string& prompt, const LlmParams& params) {
    const PromptBundle& b = PromptBundle::defaults();
    if (prompt.starts_with(b.pseudo_graph_instructions)) return draft(prompt);
    if (prompt.starts_with(b.verification_instructions)) return verify(prompt);
    if (prompt.starts_with(b.answer_instructions)) return answer(prompt);
    if (prompt.starts_with(b.io_instructions)) {
      return script(last_line_after(prompt, "Question: ")).parametric;
    }
    if (prompt.starts_with(b.cot_instructions)) {
      const Script& s = script(last_line_after(prompt, "Question: "));
      std::string final = params.seed ? s.sc_answers.at(static_cast<std::size_t>(*params.seed))
                                      : s.sc_answers.front();
      return "Recalling what I know about the question.\nAnswer: " + final;
    }
    throw Error("scripted LLM: unrecognised prompt");
  }

 private:
  const Script& script(const std::string& question) const {
    auto it = scripts_.find(question);
    if (it == scripts_.end()) throw Error("scripted LLM: no script for '" + question + "'");
    return it->second;
  }

  std::string draft(const std::string& prompt) const {
    const auto marker = std::string("\nYour previous reply could not be used.");
    auto retry = prompt.find(marker);
    std::string base = retry == std::string::npos ? prompt : prompt.substr(0, retry);
    const Script& s = script(last_line_after(base, "Question: "));
    std::size_t attempt = 0;
    if (retry != std::string::npos) {
      std::string prev = last_block(prompt, "Previous reply:\n", "\nError: ");
      for (std::size_t i = 0; i < s.drafts.size(); ++i) {
        if (s.drafts[i] == prev) attempt = i + 1;
      }
    }
    return s.drafts[std::min(attempt, s.drafts.size() - 1)];
  }

  std::string verify(const std::string& prompt) const {
    Graph draft = parse_line_format(last_block(prompt, "Draft graph:\n", "Retrieved facts:\n"),
                                    Stage::kPseudo);
    Graph retrieved = parse_line_format(
        last_block(prompt, "Retrieved facts:\n", "\n\n"), Stage::kGroundTruth);
    for (const auto& [q, s] : scripts_) {
      if (s.verify_in_prose && !draft.empty() && draft.triples().front().subject() == s.subject) {
        return "The draft looks mostly right to me, though one figure may be slightly off.";
      }
    }
    Graph fixed(Stage::kFixed);
    for (const auto& t : draft) {
      const Triple* better = nullptr;
      for (const auto& r : retrieved) {
        if (r.subject() == t.subject() && r.relation() == t.relation()) better = &r;
      }
      fixed.add(better ? *better : t);
    }
    for (const auto& r : retrieved) fixed.add(r);
    return to_line_format(fixed);
  }

  std::string answer(const std::string& prompt) const {
    const Script& s = script(last_line_after(prompt, "Question: "));
    Graph facts = parse_line_format(last_block(prompt, "Knowledge graph:\n", "\nQuestion: "),
                                    Stage::kFixed);
    for (const auto& t : facts) {
      if (t.subject() == s.subject && t.relation() == s.relation) {
        return s.answer_prefix + t.object() + ".";
      }
    }
    return s.parametric;
  }

  std::map<std::string, Script> scripts_ = scripts();
};

std::vector<QaItem> read_items(const std::string& path, DatasetFormat f) {
  std::ifstream in(path);
  return load_dataset(in, f);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: record_fixtures <fixtures-dir>\n";
    return 64;
  }
  const std::string dir = argv[1];
  try {
    ScriptedLlm script;
    FunctionClient scripted([&](const std::string& p, const LlmParams& params) {
      return script(p, params);
    });

    std::ifstream kg_in(dir + "/toy_kg.tsv");
    Graph kg = parse_triple_file(kg_in);
    HashingEmbedder embedder;
    TripleIndex index = build_index(kg, embedder);
    {
      std::ofstream out(dir + "/toy_kg.index", std::ios::binary);
      index.save(out);
    }

    auto toy = read_items(dir + "/toy_questions.jsonl", DatasetFormat::kSimpleQuestions);
    EvalConfig cfg;

    {
      Cassette c;
      CassetteClient rec(c, CassetteMode::kRecord, &scripted);
      EvalReport r = run_eval(toy, Strategy::kPgakv, {rec, &embedder, &index}, cfg);
      for (const auto& item : r.items) {
        std::cout << item.id << " " << item.score << " " << item.answer << "\n  "
                  << item.trace_summary.dump() << "\n";
      }
      for (const auto& q : toy) {
        auto res = run_pipeline(q.question, index, {embedder, rec});
        for (const auto& subj : subjects(res.trace.pseudo)) {
          auto conf = entity_confidence(res.trace.temp, subj);
          std::cout << "  " << q.id << " confidence " << subj << " = " << conf.confidence
                    << " kept " << res.trace.ground_truth.size() << "\n";
        }
      }
      c.save_file(dir + "/toy_pgakv.json");
      std::cout << "toy_pgakv.json: " << c.size() << " entries\n";
    }
    {
      Cassette c;
      CassetteClient rec(c, CassetteMode::kRecord, &scripted);
      for (Strategy s : {Strategy::kIo, Strategy::kCot, Strategy::kSc, Strategy::kRag}) {
        EvalReport r = run_eval(toy, s, {rec, &embedder, &index}, cfg);
        std::cout << to_string(s) << " mean " << r.aggregate.mean << "\n";
      }
      auto nature = read_items(dir + "/nature_sample.jsonl", DatasetFormat::kNature);
      EvalConfig ncfg;
      ncfg.metric = Metric::kRougeL;
      EvalReport r = run_eval(nature, Strategy::kIo, {rec, nullptr, nullptr}, ncfg);
      std::cout << "nature io mean " << r.aggregate.mean << "\n";
      c.save_file(dir + "/toy_baselines.json");
      std::cout << "toy_baselines.json: " << c.size() << " entries\n";
    }
    {
      Cassette c;
      CassetteClient rec(c, CassetteMode::kRecord, &scripted);
      auto res = run_pipeline("Who painted the Mona Lisa?", index, {embedder, rec});
      std::cout << "degraded=" << res.trace.degraded << " calls=" << res.trace.llm_calls << "\n";
      c.save_file(dir + "/degraded.json");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
