// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors
//
// Parser, pretty-printer and interpreter for the Cypher subset LLMs emit when
// asked to sketch a pseudo-graph: CREATE with node/relationship patterns,
// string and number property literals, optional labels and comma-separated
// pattern lists. MATCH and RETURN clauses are parsed past and ignored.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pgakv/error.hpp"
#include "pgakv/graph.hpp"

namespace pgakv::cypher {

struct PropertyValue {
  enum class Kind { kString, kNumber };
  Kind kind = Kind::kString;
  // Unescaped string contents, or the number lexeme as written ("-3.5").
  std::string text;

  friend bool operator==(const PropertyValue&, const PropertyValue&) = default;
};

using Property = std::pair<std::string, PropertyValue>;

struct NodePattern {
  std::optional<std::string> variable;
  std::vector<std::string> labels;
  std::vector<Property> properties;  // as written, keys unique

  friend bool operator==(const NodePattern&, const NodePattern&) = default;
};

enum class Direction {
  kOutgoing,  // (a)-[:T]->(b)
  kIncoming,  // (a)<-[:T]-(b)
};

struct RelationshipPattern {
  std::optional<std::string> variable;
  std::string type;
  Direction direction = Direction::kOutgoing;
  std::vector<Property> properties;

  friend bool operator==(const RelationshipPattern&,
                         const RelationshipPattern&) = default;
};

/// One path pattern: nodes[i] and nodes[i + 1] are joined by
/// relationships[i], so relationships.size() == nodes.size() - 1.
struct CreatePattern {
  std::vector<NodePattern> nodes;
  std::vector<RelationshipPattern> relationships;

  friend bool operator==(const CreatePattern&, const CreatePattern&) = default;
};

/// Every CREATE path in script order. A comma-separated CREATE contributes one
/// entry per path. Variables bind script-wide.
struct CypherScript {
  std::vector<CreatePattern> statements;

  std::size_t relationship_count() const noexcept;

  friend bool operator==(const CypherScript&, const CypherScript&) = default;
};

class CypherError : public Error {
 public:
  enum class Kind { kLexical, kSyntax, kUnresolvedVariable, kUnsupportedClause };

  CypherError(Kind kind, std::size_t offset, std::size_t line,
              std::size_t column, const std::string& message);

  Kind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  Kind kind_;
  std::size_t offset_;
  std::size_t line_;
  std::size_t column_;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

/// Bodies of all ``` fenced blocks joined by '\n', or the trimmed input when
/// there are none.
std::string extract_code(std::string_view llm_output);

/// Throws CypherError.
CypherScript parse_cypher(std::string_view script);

/// Canonical form: one `CREATE <path>` per line, double-quoted strings,
/// single space after ':' and ',' in maps.
std::string print_cypher(const CypherScript& script);

/// "FIELD_OF_WORK" -> "field of work".
std::string humanize_rel_type(std::string_view rel_type);

/// Property used as a node's label in decoded triples: `name`, else `title`,
/// else the lexicographically smallest key. nullopt when there are none.
std::optional<std::string> identifying_property(const NodePattern& node);

/// One triple per relationship (subject = from-node, object = to-node after
/// honouring the arrow). Throws DecodeError listing every variable whose node
/// takes part in a relationship but has no identifying property.
Graph execute(const CypherScript& script);

}  // namespace pgakv::cypher
