// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors

#include "pgakv/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "pgakv/error.hpp"

namespace pgakv {

namespace {

PromptBundle make_defaults() {
  PromptBundle b;

  b.pseudo_graph_instructions =
      "You write Cypher CREATE statements that record the facts needed to answer a "
      "question. Use one node per entity with a `name` property and one relationship "
      "per fact; relationship types are UPPER_SNAKE_CASE. Write only Cypher inside a "
      "```cypher block, no explanation.";
  b.pseudo_graph_examples = {{
      {"Who painted the ceiling of the Sistine Chapel?",
       "CREATE (a:Artwork {name: \"Sistine Chapel ceiling\"})-[:CREATOR]->"
       "(b:Person {name: \"Michelangelo\"})\n"
       "CREATE (b)-[:OCCUPATION]->(c:Occupation {name: \"painter\"})\n"
       "CREATE (a)-[:LOCATED_IN]->(d:Place {name: \"Vatican City\"})"},
      {"What language is spoken in the country where the Amazon river ends?",
       "CREATE (r:River {name: \"Amazon\"})-[:MOUTH_OF_THE_WATERCOURSE]->"
       "(o:Sea {name: \"Atlantic Ocean\"}), (r)-[:COUNTRY]->(c:Country {name: \"Brazil\"})\n"
       "CREATE (c)-[:OFFICIAL_LANGUAGE]->(l:Language {name: \"Portuguese\"})"},
  }};

  b.verification_instructions =
      "You check a draft knowledge graph against facts retrieved from a trusted "
      "knowledge graph. Keep draft triples the retrieved facts support, replace "
      "triples the retrieved facts contradict with the retrieved version, and add "
      "retrieved facts that are relevant to the draft. Facts listed earlier in the "
      "retrieved block are more reliable. Output the fixed graph as lines of the form "
      "subject | relation | object and nothing else.";
  b.verification_examples = {{
      {"Mount Kilimanjaro | country | Kenya\n"
       "Mount Kilimanjaro | elevation above sea level | 5895 metres\n",
       "Mount Kilimanjaro | country | Tanzania\n"
       "Mount Kilimanjaro | elevation above sea level | 5895 metres\n"
       "Mount Kilimanjaro | instance of | volcano\n",
       "Mount Kilimanjaro | country | Tanzania\n"
       "Mount Kilimanjaro | elevation above sea level | 5895 metres\n"
       "Mount Kilimanjaro | instance of | volcano\n"},
      {"Jane Austen | notable work | Jane Eyre\n"
       "Jane Austen | place of birth | Steventon\n",
       "Jane Austen | notable work | Pride and Prejudice\n"
       "Jane Austen | place of birth | Steventon\n",
       "Jane Austen | notable work | Pride and Prejudice\n"
       "Jane Austen | place of birth | Steventon\n"},
  }};
  b.verification_task =
      "Fix the draft graph using the retrieved facts. Reply with the fixed graph only.";

  b.answer_instructions =
      "Answer the question using the knowledge graph facts. Prefer the facts over "
      "your own memory when they disagree. Answer in one or two sentences.";
  b.answer_examples = {{
      {"Sistine Chapel ceiling | creator | Michelangelo\n"
       "Michelangelo | occupation | painter\n",
       "Who painted the ceiling of the Sistine Chapel?",
       "The Sistine Chapel ceiling was painted by Michelangelo."},
      {"Amazon | country | Brazil\nBrazil | official language | Portuguese\n",
       "What language is spoken in the country where the Amazon river ends?",
       "The Amazon ends in Brazil, where Portuguese is spoken."},
  }};

  b.io_instructions = "Answer the question in one short sentence.";
  b.io_examples = {{
      {"What is the capital of Canada?", "Ottawa."},
      {"Who wrote Hamlet?", "William Shakespeare."},
      {"Which planet is known as the Red Planet?", "Mars."},
      {"What is the chemical symbol for gold?", "Au."},
      {"In which country is the Taj Mahal?", "India."},
      {"Who developed the theory of general relativity?", "Albert Einstein."},
  }};

  b.cot_instructions =
      "Answer the question. Think step by step, then give the final answer on a "
      "line starting with \"Answer:\".";
  b.cot_examples = {{
      {"What is the capital of Canada?",
       "Canada is a country in North America. Its seat of government is Ottawa.",
       "Ottawa."},
      {"Who wrote Hamlet?",
       "Hamlet is an Elizabethan tragedy. It was written by William Shakespeare.",
       "William Shakespeare."},
      {"Which planet is known as the Red Planet?",
       "Iron oxide on its surface gives Mars a reddish colour.", "Mars."},
      {"What is the chemical symbol for gold?",
       "The symbol comes from the Latin word aurum.", "Au."},
      {"In which country is the Taj Mahal?",
       "The Taj Mahal stands in Agra, a city in India.", "India."},
      {"Who developed the theory of general relativity?",
       "General relativity was published in 1915 by Albert Einstein.",
       "Albert Einstein."},
  }};
  return b;
}

std::string facts_block(const Graph& g, std::string_view empty_marker) {
  if (g.empty()) return std::string(empty_marker) + "\n";
  return to_line_format(g);
}

void ensure_newline(std::string& s) {
  if (!s.empty() && s.back() != '\n') s += '\n';
}

}  // namespace

const PromptBundle& PromptBundle::defaults() {
  static const PromptBundle bundle = make_defaults();
  return bundle;
}

std::string build_pseudo_graph_prompt(std::string_view question, const PromptBundle& b) {
  std::string p = b.pseudo_graph_instructions + "\n\n";
  for (std::size_t i = 0; i < b.pseudo_graph_examples.size(); ++i) {
    const auto& ex = b.pseudo_graph_examples[i];
    p += "Example " + std::to_string(i + 1) + "\n";
    p += "Question: " + ex.question + "\n";
    p += "```cypher\n" + ex.cypher + "\n```\n\n";
  }
  p += "Question: ";
  p += question;
  p += "\n";
  return p;
}

std::string build_pseudo_graph_retry_prompt(std::string_view question,
                                            std::string_view previous_output,
                                            std::string_view error,
                                            const PromptBundle& b) {
  std::string p = build_pseudo_graph_prompt(question, b);
  p += "\nYour previous reply could not be used.\nPrevious reply:\n";
  p += previous_output;
  p += "\nError: ";
  p += error;
  p += "\nReply again with only Cypher CREATE statements in a ```cypher block.\n";
  return p;
}

std::string build_verification_prompt(const Graph& pseudo, const Graph& ground_truth,
                                      std::span<const EntityConfidence> confidences,
                                      const PromptBundle& b) {
  std::map<std::string, std::vector<const Triple*>> by_subject;
  for (const auto& t : ground_truth) by_subject[t.subject()].push_back(&t);
  for (const auto& [subject, _] : by_subject) {
    bool covered = false;
    for (const auto& c : confidences) covered = covered || c.subject == subject;
    if (!covered) {
      throw ContractError("no entity confidence for ground-truth subject '" + subject + "'");
    }
  }
  std::vector<EntityConfidence> order(confidences.begin(), confidences.end());
  std::stable_sort(order.begin(), order.end(),
                   [](const EntityConfidence& lhs, const EntityConfidence& rhs) {
                     if (lhs.confidence != rhs.confidence) {
                       return lhs.confidence > rhs.confidence;
                     }
                     return lhs.subject < rhs.subject;
                   });

  std::string p = b.verification_instructions + "\n\n";
  for (std::size_t i = 0; i < b.verification_examples.size(); ++i) {
    const auto& ex = b.verification_examples[i];
    p += "Example " + std::to_string(i + 1) + "\n";
    p += "Draft graph:\n" + ex.pseudo_graph;
    ensure_newline(p);
    p += "Retrieved facts:\n" + ex.retrieved_facts;
    ensure_newline(p);
    p += "Fixed graph:\n" + ex.fixed_graph;
    ensure_newline(p);
    p += "\n";
  }
  p += "Draft graph:\n" + facts_block(pseudo, kNoVerifiedFacts);
  p += "Retrieved facts:\n";
  if (ground_truth.empty()) {
    p += std::string(kNoRetrievedFacts) + "\n";
  } else {
    for (const auto& c : order) {
      auto it = by_subject.find(c.subject);
      if (it == by_subject.end()) continue;
      for (const Triple* t : it->second) p += to_line(*t) + "\n";
    }
  }
  p += "\n" + b.verification_task + "\nFixed graph:\n";
  return p;
}

std::string build_verification_retry_prompt(std::string_view base_prompt,
                                            std::string_view previous_output) {
  std::string p(base_prompt);
  p += "\nYour previous reply contained no lines of the form subject | relation | "
       "object.\nPrevious reply:\n";
  p += previous_output;
  p += "\nReply again with the fixed graph only, one triple per line.\nFixed graph:\n";
  return p;
}

std::string build_answer_prompt(std::string_view question, const Graph& facts,
                                const PromptBundle& b) {
  std::string p = b.answer_instructions + "\n\n";
  for (std::size_t i = 0; i < b.answer_examples.size(); ++i) {
    const auto& ex = b.answer_examples[i];
    p += "Example " + std::to_string(i + 1) + "\n";
    p += "Knowledge graph:\n" + ex.facts;
    ensure_newline(p);
    p += "Question: " + ex.question + "\n";
    p += "Answer: " + ex.answer + "\n\n";
  }
  p += "Knowledge graph:\n" + facts_block(facts, kNoVerifiedFacts);
  p += "Question: ";
  p += question;
  p += "\nAnswer:";
  return p;
}

std::string build_io_prompt(std::string_view question, const PromptBundle& b) {
  std::string p = b.io_instructions + "\n\n";
  for (const auto& ex : b.io_examples) {
    p += "Question: " + ex.question + "\nAnswer: " + ex.answer + "\n\n";
  }
  p += "Question: ";
  p += question;
  p += "\nAnswer:";
  return p;
}

std::string build_cot_prompt(std::string_view question, const PromptBundle& b) {
  std::string p = b.cot_instructions + "\n\n";
  for (const auto& ex : b.cot_examples) {
    p += "Question: " + ex.question + "\n" + ex.reasoning + "\nAnswer: " + ex.answer +
         "\n\n";
  }
  p += "Question: ";
  p += question;
  p += "\n";
  return p;
}

std::string extract_final_answer(std::string_view reply) {
  std::size_t best = std::string_view::npos;
  for (std::size_t i = 0; i + 7 <= reply.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < 7 && match; ++k) {
      match = std::tolower(static_cast<unsigned char>(reply[i + k])) == "answer:"[k];
    }
    if (match) best = i + 7;
  }
  if (best == std::string_view::npos) return std::string(trim(reply));
  return std::string(trim(reply.substr(best)));
}

}  // namespace pgakv
