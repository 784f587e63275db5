// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors
//
// Triple / graph data model shared by every pipeline stage, plus the TSV
// knowledge-graph file format and the "s | r | o" prompt line format.

#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace pgakv {

/// One atomic fact. Fields are trimmed on construction and must be non-empty
/// and free of tabs/newlines; the constructor throws ContractError otherwise.
class Triple {
 public:
  Triple(std::string_view subject, std::string_view relation,
         std::string_view object);

  const std::string& subject() const noexcept { return subject_; }
  const std::string& relation() const noexcept { return relation_; }
  const std::string& object() const noexcept { return object_; }

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;

 private:
  std::string subject_;
  std::string relation_;
  std::string object_;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept;
};

/// Which pipeline stage produced a graph. Carried as metadata only; two graphs
/// with the same triples but different stages still compare equal.
enum class Stage { kBase, kPseudo, kGroundTruth, kFixed };

std::string_view stage_name(Stage stage) noexcept;

/// Ordered, duplicate-free collection of triples. First insertion wins.
class Graph {
 public:
  Graph() = default;
  explicit Graph(Stage stage) : stage_(stage) {}

  /// Returns false if the triple was already present.
  bool add(const Triple& t);

  const std::vector<Triple>& triples() const noexcept { return triples_; }
  std::size_t size() const noexcept { return triples_.size(); }
  bool empty() const noexcept { return triples_.empty(); }
  bool contains(const Triple& t) const { return seen_.contains(t); }

  Stage stage() const noexcept { return stage_; }
  void set_stage(Stage stage) noexcept { stage_ = stage; }

  auto begin() const noexcept { return triples_.begin(); }
  auto end() const noexcept { return triples_.end(); }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.triples_ == b.triples_;
  }

 private:
  Stage stage_ = Stage::kBase;
  std::vector<Triple> triples_;
  std::unordered_set<Triple, TripleHash> seen_;
};

/// Distinct subject labels of `graph`.
std::set<std::string> subjects(const Graph& graph);

/// Union of both graphs, `a`'s order first. Result keeps `a`'s stage.
Graph merge(const Graph& a, const Graph& b);

/// Reads the TSV knowledge-graph format: subject TAB relation TAB object, one
/// record per line, blank lines and '#' comments skipped. Throws ParseError on
/// a wrong field count and EncodingError on invalid UTF-8; both name the line.
Graph parse_triple_file(std::istream& in);

/// Writes the TSV format read by parse_triple_file.
void write_triple_file(std::ostream& out, const Graph& graph);

/// "<subject> | <relation> | <object>" for one triple.
std::string to_line(const Triple& t);

/// One to_line() per triple, each terminated by '\n'.
std::string to_line_format(const Graph& graph);

/// Decodes every well-formed "s | r | o" line in free text, skipping prose and
/// leading list markers. Malformed lines are ignored.
Graph parse_line_format(std::string_view text, Stage stage);

// Helpers shared with other modules.
std::string_view trim(std::string_view s) noexcept;
bool is_valid_utf8(std::string_view s) noexcept;

}  // namespace pgakv
