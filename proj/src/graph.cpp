// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors

#include "pgakv/graph.hpp"

#include <cctype>
#include <string>

#include "pgakv/error.hpp"

namespace pgakv {

namespace {

std::string checked_field(std::string_view raw, const char* role) {
  std::string_view v = trim(raw);
  if (v.empty()) {
    throw ContractError(std::string("triple ") + role + " is empty");
  }
  if (v.find_first_of("\t\n\r") != std::string_view::npos) {
    throw ContractError(std::string("triple ") + role +
                        " contains a tab or newline");
  }
  return std::string(v);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

// "- ", "* ", "• ", "12. ", "3) "
std::string_view strip_list_marker(std::string_view line) {
  if (line.starts_with("- ") || line.starts_with("* ")) {
    return trim(line.substr(2));
  }
  if (line.starts_with("\xE2\x80\xA2")) return trim(line.substr(3));
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
    ++i;
  }
  if (i > 0 && i + 1 < line.size() && (line[i] == '.' || line[i] == ')') &&
      line[i + 1] == ' ') {
    return trim(line.substr(i + 2));
  }
  return line;
}

}  // namespace

std::string_view trim(std::string_view s) noexcept {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  std::size_t b = s.find_first_not_of(kSpace);
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(kSpace);
  return s.substr(b, e - b + 1);
}

bool is_valid_utf8(std::string_view s) noexcept {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra;
    char32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates, out of range.
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) ||
        (extra == 3 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += extra + 1;
  }
  return true;
}

Triple::Triple(std::string_view subject, std::string_view relation,
               std::string_view object)
    : subject_(checked_field(subject, "subject")),
      relation_(checked_field(relation, "relation")),
      object_(checked_field(object, "object")) {}

std::size_t TripleHash::operator()(const Triple& t) const noexcept {
  std::hash<std::string> h;
  std::size_t seed = h(t.subject());
  seed ^= h(t.relation()) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
  seed ^= h(t.object()) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
  return seed;
}

std::string_view stage_name(Stage stage) noexcept {
  switch (stage) {
    case Stage::kBase:
      return "base";
    case Stage::kPseudo:
      return "pseudo";
    case Stage::kGroundTruth:
      return "ground_truth";
    case Stage::kFixed:
      return "fixed";
  }
  return "unknown";
}

bool Graph::add(const Triple& t) {
  if (!seen_.insert(t).second) return false;
  triples_.push_back(t);
  return true;
}

std::set<std::string> subjects(const Graph& graph) {
  std::set<std::string> out;
  for (const auto& t : graph) out.insert(t.subject());
  return out;
}

Graph merge(const Graph& a, const Graph& b) {
  Graph out(a.stage());
  for (const auto& t : a) out.add(t);
  for (const auto& t : b) out.add(t);
  return out;
}

Graph parse_triple_file(std::istream& in) {
  Graph graph;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!is_valid_utf8(line)) throw EncodingError(line_no, "invalid UTF-8");
    if (trim(line).empty() || line.front() == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw ParseError(line_no, "expected 3 tab-separated fields, got " +
                                    std::to_string(fields.size()));
    }
    try {
      graph.add(Triple(fields[0], fields[1], fields[2]));
    } catch (const ContractError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return graph;
}

void write_triple_file(std::ostream& out, const Graph& graph) {
  for (const auto& t : graph) {
    out << t.subject() << '\t' << t.relation() << '\t' << t.object() << '\n';
  }
}

std::string to_line(const Triple& t) {
  return t.subject() + " | " + t.relation() + " | " + t.object();
}

std::string to_line_format(const Graph& graph) {
  std::string out;
  for (const auto& t : graph) {
    out += to_line(t);
    out += '\n';
  }
  return out;
}

Graph parse_line_format(std::string_view text, Stage stage) {
  Graph graph(stage);
  for (std::string_view raw : split(text, '\n')) {
    std::string_view line = strip_list_marker(trim(raw));
    auto fields = split(line, '|');
    if (fields.size() != 3) continue;
    try {
      graph.add(Triple(fields[0], fields[1], fields[2]));
    } catch (const ContractError&) {
      // empty field: not a triple line
    }
  }
  return graph;
}

}  // namespace pgakv
