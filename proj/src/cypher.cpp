// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors

#include "pgakv/cypher.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <unordered_map>

namespace pgakv::cypher {

namespace {

enum class Tok {
  kLParen,
  kRParen,
  kLBracket,
  kRBracket,
  kLBrace,
  kRBrace,
  kColon,
  kComma,
  kSemicolon,
  kDash,
  kGt,
  kLt,
  kIdent,
  kString,
  kNumber,
  kSymbol,  // any other punctuation; only legal inside skipped RETURN clauses
  kEnd,
};

struct Token {
  Tok kind;
  std::string text;  // identifier name, unescaped string, number lexeme
  bool quoted = false;  // backticked identifier
  std::size_t offset = 0;
};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space_and_comments();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::kEnd, {}, false, pos_});
        return out;
      }
      out.push_back(next());
    }
  }

  [[noreturn]] void fail(std::size_t at, const std::string& msg) const {
    throw error_at(src_, CypherError::Kind::kLexical, at, msg);
  }

  static CypherError error_at(std::string_view src, CypherError::Kind kind,
                              std::size_t at, const std::string& msg) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < at && i < src.size(); ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return CypherError(kind, at, line, col, msg);
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        return;
      }
    }
  }

  Token next() {
    std::size_t start = pos_;
    char c = src_[pos_];
    auto single = [&](Tok k) {
      ++pos_;
      return Token{k, std::string(1, c), false, start};
    };
    switch (c) {
      case '(': return single(Tok::kLParen);
      case ')': return single(Tok::kRParen);
      case '[': return single(Tok::kLBracket);
      case ']': return single(Tok::kRBracket);
      case '{': return single(Tok::kLBrace);
      case '}': return single(Tok::kRBrace);
      case ':': return single(Tok::kColon);
      case ',': return single(Tok::kComma);
      case ';': return single(Tok::kSemicolon);
      case '-': return single(Tok::kDash);
      case '>': return single(Tok::kGt);
      case '<': return single(Tok::kLt);
      case '"':
      case '\'':
        return string_literal();
      case '`':
        return quoted_ident();
      default:
        break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (ident_start(c)) {
      while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
      return {Tok::kIdent, std::string(src_.substr(start, pos_ - start)), false,
              start};
    }
    if (std::ispunct(static_cast<unsigned char>(c))) return single(Tok::kSymbol);
    fail(start, "unexpected character '" + std::string(1, c) + "'");
  }

  Token string_literal() {
    std::size_t start = pos_;
    char quote = src_[pos_++];
    std::string value;
    while (true) {
      if (pos_ >= src_.size()) fail(start, "unterminated string literal");
      char c = src_[pos_++];
      if (c == quote) break;
      if (c == '\\') {
        if (pos_ >= src_.size()) fail(start, "unterminated string literal");
        char e = src_[pos_];
        if (e != '"' && e != '\'' && e != '\\') {
          fail(pos_ - 1, std::string("unsupported escape '\\") + e + "'");
        }
        value += e;
        ++pos_;
        continue;
      }
      value += c;
    }
    return {Tok::kString, std::move(value), false, start};
  }

  Token quoted_ident() {
    std::size_t start = pos_++;
    std::string value;
    while (true) {
      if (pos_ >= src_.size()) fail(start, "unterminated backtick identifier");
      char c = src_[pos_++];
      if (c == '`') {
        if (pos_ < src_.size() && src_[pos_] == '`') {
          value += '`';
          ++pos_;
          continue;
        }
        break;
      }
      value += c;
    }
    if (value.empty()) fail(start, "empty backtick identifier");
    return {Tok::kIdent, std::move(value), true, start};
  }

  Token number() {
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t b = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      return pos_ > b;
    };
    digits();
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      ++pos_;
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (!digits()) pos_ = save;
    }
    if (pos_ < src_.size() && ident_char(src_[pos_])) {
      fail(start, "malformed number literal");
    }
    return {Tok::kNumber, std::string(src_.substr(start, pos_ - start)), false,
            start};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  Parser(std::string_view src, std::vector<Token> tokens)
      : src_(src), toks_(std::move(tokens)) {}

  CypherScript run() {
    CypherScript script;
    while (peek().kind != Tok::kEnd) {
      if (peek().kind == Tok::kSemicolon) {
        ++pos_;
        continue;
      }
      const Token& t = peek();
      if (t.kind != Tok::kIdent || t.quoted) {
        fail(CypherError::Kind::kSyntax, t, "expected a clause keyword");
      }
      std::string kw = upper(t.text);
      if (kw == "CREATE") {
        ++pos_;
        create_clause(script);
      } else if (kw == "MATCH") {
        ++pos_;
        match_clause();
      } else if (kw == "RETURN") {
        ++pos_;
        skip_return();
      } else {
        fail(CypherError::Kind::kUnsupportedClause, t,
             "unsupported clause " + kw);
      }
    }
    return script;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }

  [[noreturn]] void fail(CypherError::Kind kind, const Token& at,
                         const std::string& msg) const {
    throw Lexer::error_at(src_, kind, at.offset, msg);
  }

  const Token& expect(Tok kind, const char* what) {
    const Token& t = peek();
    if (t.kind != kind) {
      std::string got = t.kind == Tok::kEnd ? "end of input" : "'" + t.text + "'";
      fail(CypherError::Kind::kSyntax, t,
           std::string("expected ") + what + ", got " + got);
    }
    ++pos_;
    return t;
  }

  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    ++pos_;
    return true;
  }

  bool at_keyword(std::string_view kw) const {
    const Token& t = peek();
    return t.kind == Tok::kIdent && !t.quoted && upper(t.text) == kw;
  }

  void create_clause(CypherScript& script) {
    do {
      std::size_t first_node_tok = pos_;
      CreatePattern pat = path(/*strict=*/true);
      bind_create(pat, first_node_tok);
      script.statements.push_back(std::move(pat));
    } while (accept(Tok::kComma));
  }

  // Variables introduced by MATCH are not bound: the clause only queries.
  void match_clause() {
    do {
      path(/*strict=*/false);
    } while (accept(Tok::kComma));
  }

  void skip_return() {
    int depth = 0;
    while (peek().kind != Tok::kEnd) {
      Tok k = peek().kind;
      if (depth == 0 &&
          (k == Tok::kSemicolon || at_keyword("CREATE") || at_keyword("MATCH"))) {
        return;
      }
      if (k == Tok::kLParen || k == Tok::kLBracket || k == Tok::kLBrace) ++depth;
      if (k == Tok::kRParen || k == Tok::kRBracket || k == Tok::kRBrace) --depth;
      ++pos_;
    }
  }

  void bind_create(const CreatePattern& pat, std::size_t tok_index) {
    // Re-locate node tokens for error positions: each node starts with '('.
    std::vector<std::size_t> node_toks;
    for (std::size_t i = tok_index; i < pos_; ++i) {
      if (toks_[i].kind == Tok::kLParen) node_toks.push_back(i);
    }
    for (std::size_t i = 0; i < pat.nodes.size(); ++i) {
      const NodePattern& n = pat.nodes[i];
      const Token& at = toks_[i < node_toks.size() ? node_toks[i] : tok_index];
      bool bare = n.labels.empty() && n.properties.empty();
      if (!n.variable) {
        if (bare) {
          fail(CypherError::Kind::kUnresolvedVariable, at,
               "anonymous node without labels or properties");
        }
        continue;
      }
      if (bound_.contains(*n.variable)) continue;
      if (bare) {
        fail(CypherError::Kind::kUnresolvedVariable, at,
             "unresolved variable '" + *n.variable + "'");
      }
      bound_.insert(*n.variable);
    }
  }

  CreatePattern path(bool strict) {
    CreatePattern pat;
    pat.nodes.push_back(node());
    while (peek().kind == Tok::kDash || peek().kind == Tok::kLt) {
      pat.relationships.push_back(relationship(strict));
      pat.nodes.push_back(node());
    }
    return pat;
  }

  NodePattern node() {
    NodePattern n;
    expect(Tok::kLParen, "'('");
    if (peek().kind == Tok::kIdent) n.variable = toks_[pos_++].text;
    while (accept(Tok::kColon)) {
      n.labels.push_back(expect(Tok::kIdent, "label").text);
    }
    if (peek().kind == Tok::kLBrace) n.properties = property_map();
    expect(Tok::kRParen, "')'");
    return n;
  }

  RelationshipPattern relationship(bool strict) {
    RelationshipPattern r;
    const Token& start = peek();
    bool left = accept(Tok::kLt);
    expect(Tok::kDash, "'-'");
    bool has_detail = false;
    if (accept(Tok::kLBracket)) {
      has_detail = true;
      if (peek().kind == Tok::kIdent) r.variable = toks_[pos_++].text;
      if (accept(Tok::kColon)) {
        r.type = expect(Tok::kIdent, "relationship type").text;
      }
      if (peek().kind == Tok::kLBrace) r.properties = property_map();
      expect(Tok::kRBracket, "']'");
    }
    expect(Tok::kDash, "'-'");
    bool right = accept(Tok::kGt);
    if (strict) {
      if (!has_detail || r.type.empty()) {
        fail(CypherError::Kind::kSyntax, start,
             "relationship in CREATE needs a type");
      }
      if (left == right) {
        fail(CypherError::Kind::kSyntax, start,
             "relationship in CREATE needs exactly one direction");
      }
    }
    r.direction = left ? Direction::kIncoming : Direction::kOutgoing;
    return r;
  }

  std::vector<Property> property_map() {
    std::vector<Property> props;
    expect(Tok::kLBrace, "'{'");
    if (accept(Tok::kRBrace)) return props;
    do {
      const Token& key = expect(Tok::kIdent, "property key");
      for (const auto& [k, _] : props) {
        if (k == key.text) {
          fail(CypherError::Kind::kSyntax, key,
               "duplicate property key '" + key.text + "'");
        }
      }
      expect(Tok::kColon, "':'");
      props.emplace_back(key.text, literal());
    } while (accept(Tok::kComma));
    expect(Tok::kRBrace, "'}'");
    return props;
  }

  PropertyValue literal() {
    const Token& t = peek();
    if (t.kind == Tok::kString) {
      ++pos_;
      return {PropertyValue::Kind::kString, t.text};
    }
    if (t.kind == Tok::kNumber) {
      ++pos_;
      return {PropertyValue::Kind::kNumber, t.text};
    }
    if (t.kind == Tok::kDash && peek(1).kind == Tok::kNumber &&
        peek(1).offset == t.offset + 1) {
      std::string text = "-" + peek(1).text;
      pos_ += 2;
      return {PropertyValue::Kind::kNumber, std::move(text)};
    }
    fail(CypherError::Kind::kSyntax, t,
         "expected a string or number literal");
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::set<std::string> bound_;
};

bool plain_identifier(std::string_view s) {
  if (s.empty() || !ident_start(s.front())) return false;
  if (!std::all_of(s.begin(), s.end(), ident_char)) return false;
  std::string u = upper(s);
  return u != "CREATE" && u != "MATCH" && u != "RETURN";
}

void print_identifier(std::string& out, std::string_view s) {
  if (plain_identifier(s)) {
    out += s;
    return;
  }
  out += '`';
  for (char c : s) {
    if (c == '`') out += '`';
    out += c;
  }
  out += '`';
}

void print_properties(std::string& out, const std::vector<Property>& props) {
  if (props.empty()) return;
  out += " {";
  bool first = true;
  for (const auto& [key, value] : props) {
    if (!first) out += ", ";
    first = false;
    print_identifier(out, key);
    out += ": ";
    if (value.kind == PropertyValue::Kind::kNumber) {
      out += value.text;
    } else {
      out += '"';
      for (char c : value.text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      out += '"';
    }
  }
  out += '}';
}

void print_node(std::string& out, const NodePattern& n) {
  out += '(';
  if (n.variable) print_identifier(out, *n.variable);
  for (const auto& label : n.labels) {
    out += ':';
    print_identifier(out, label);
  }
  if (!n.properties.empty()) {
    std::string props;
    print_properties(props, n.properties);
    // Drop the leading space when nothing precedes the map.
    out += (n.variable || !n.labels.empty()) ? props : props.substr(1);
  }
  out += ')';
}

void print_relationship(std::string& out, const RelationshipPattern& r) {
  out += r.direction == Direction::kIncoming ? "<-[" : "-[";
  if (r.variable) print_identifier(out, *r.variable);
  out += ':';
  print_identifier(out, r.type);
  print_properties(out, r.properties);
  out += r.direction == Direction::kIncoming ? "]-" : "]->";
}

}  // namespace

CypherError::CypherError(Kind kind, std::size_t offset, std::size_t line,
                         std::size_t column, const std::string& message)
    : Error("cypher " +
            std::string(kind == Kind::kLexical              ? "lexical error"
                        : kind == Kind::kSyntax             ? "syntax error"
                        : kind == Kind::kUnresolvedVariable ? "unresolved variable"
                                                            : "unsupported clause") +
            " at line " + std::to_string(line) + ", column " +
            std::to_string(column) + ": " + message),
      kind_(kind),
      offset_(offset),
      line_(line),
      column_(column) {}

std::size_t CypherScript::relationship_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : statements) n += s.relationships.size();
  return n;
}

std::string extract_code(std::string_view text) {
  std::vector<std::string_view> bodies;
  std::size_t pos = 0;
  while (true) {
    std::size_t open = text.find("```", pos);
    if (open == std::string_view::npos) break;
    std::size_t body = open + 3;
    std::size_t eol = text.find('\n', body);
    std::string_view info = text.substr(
        body, (eol == std::string_view::npos ? text.size() : eol) - body);
    bool is_tag = std::all_of(info.begin(), info.end(), [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
             c == '-' || c == '+';
    });
    if (is_tag && eol != std::string_view::npos) body = eol + 1;
    std::size_t close = text.find("```", body);
    if (close == std::string_view::npos) {
      bodies.push_back(trim(text.substr(body)));
      break;
    }
    bodies.push_back(trim(text.substr(body, close - body)));
    pos = close + 3;
  }
  if (bodies.empty()) return std::string(trim(text));
  std::string out;
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    if (i) out += '\n';
    out += bodies[i];
  }
  return out;
}

CypherScript parse_cypher(std::string_view script) {
  Lexer lexer(script);
  Parser parser(script, lexer.run());
  return parser.run();
}

std::string print_cypher(const CypherScript& script) {
  std::string out;
  for (const auto& stmt : script.statements) {
    out += "CREATE ";
    print_node(out, stmt.nodes.front());
    for (std::size_t i = 0; i < stmt.relationships.size(); ++i) {
      print_relationship(out, stmt.relationships[i]);
      print_node(out, stmt.nodes[i + 1]);
    }
    out += '\n';
  }
  return out;
}

std::string humanize_rel_type(std::string_view rel_type) {
  std::string out;
  bool pending_space = false;
  for (char c : rel_type) {
    if (c == '_' || std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::optional<std::string> identifying_property(const NodePattern& node) {
  if (node.properties.empty()) return std::nullopt;
  const Property* chosen = nullptr;
  for (const char* preferred : {"name", "title"}) {
    for (const auto& p : node.properties) {
      if (p.first == preferred) {
        chosen = &p;
        break;
      }
    }
    if (chosen) break;
  }
  if (!chosen) {
    chosen = &*std::min_element(
        node.properties.begin(), node.properties.end(),
        [](const Property& a, const Property& b) { return a.first < b.first; });
  }
  if (trim(chosen->second.text).empty()) return std::nullopt;
  return chosen->second.text;
}

Graph execute(const CypherScript& script) {
  Graph graph(Stage::kPseudo);
  std::unordered_map<std::string, const NodePattern*> bindings;
  std::vector<std::string> missing;
  auto note_missing = [&](const NodePattern& n) {
    std::string name = n.variable ? *n.variable : "<anonymous>";
    if (std::find(missing.begin(), missing.end(), name) == missing.end()) {
      missing.push_back(std::move(name));
    }
  };

  for (const auto& stmt : script.statements) {
    std::vector<const NodePattern*> resolved;
    for (const auto& n : stmt.nodes) {
      if (n.variable) {
        auto [it, inserted] = bindings.emplace(*n.variable, &n);
        resolved.push_back(it->second);
      } else {
        resolved.push_back(&n);
      }
    }
    for (std::size_t i = 0; i < stmt.relationships.size(); ++i) {
      const auto& rel = stmt.relationships[i];
      const NodePattern* from = resolved[i];
      const NodePattern* to = resolved[i + 1];
      if (rel.direction == Direction::kIncoming) std::swap(from, to);
      auto s = identifying_property(*from);
      auto o = identifying_property(*to);
      if (!s) note_missing(*from);
      if (!o) note_missing(*to);
      if (!s || !o) continue;
      std::string relation = humanize_rel_type(rel.type);
      try {
        graph.add(Triple(*s, relation, *o));
      } catch (const ContractError& e) {
        throw DecodeError(std::string("cannot decode relationship ") +
                          rel.type + ": " + e.what());
      }
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) {
      if (!list.empty()) list += ", ";
      list += m;
    }
    throw DecodeError("nodes without an identifying property: " + list);
  }
  return graph;
}

}  // namespace pgakv::cypher
