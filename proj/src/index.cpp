// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors

#include "pgakv/index.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace pgakv {

namespace {

constexpr std::string_view kMagic = "pgakv-index\t1";

void check_fingerprint(const TripleIndex& index, EmbeddingProvider& provider) {
  std::string fp = provider.fingerprint();
  if (fp != index.fingerprint()) {
    throw StaleIndexError("index was built with provider '" + index.fingerprint() +
                          "' but queried with '" + fp + "'");
  }
}

std::string header_value(std::istream& in, std::size_t line, std::string_view key) {
  std::string text;
  if (!std::getline(in, text)) throw ParseError(line, "truncated index header");
  std::size_t tab = text.find('\t');
  if (tab == std::string::npos || std::string_view(text).substr(0, tab) != key) {
    throw ParseError(line, "expected '" + std::string(key) + "' header");
  }
  return text.substr(tab + 1);
}

std::size_t parse_count(const std::string& s, std::size_t line) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ParseError(line, "bad integer '" + s + "'");
  }
  return v;
}

}  // namespace

std::string serialize_for_embedding(const Triple& t) {
  return t.subject() + ' ' + t.relation() + ' ' + t.object();
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ContractError("cosine: dimension mismatch (" + std::to_string(a.size()) +
                        " vs " + std::to_string(b.size()) + ")");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw ContractError("cosine: zero vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

TripleIndex::TripleIndex(std::string fingerprint, std::size_t dimension)
    : fingerprint_(std::move(fingerprint)), dimension_(dimension) {
  if (dimension_ == 0) throw ContractError("index dimension must be positive");
  if (fingerprint_.find_first_of("\t\n") != std::string::npos) {
    throw ContractError("fingerprint must not contain tabs or newlines");
  }
}

void TripleIndex::append(const Triple& t, Vector v) {
  if (v.size() != dimension_) {
    throw ContractError("vector dimension " + std::to_string(v.size()) +
                        " does not match index dimension " +
                        std::to_string(dimension_));
  }
  triples_.push_back(t);
  data_.insert(data_.end(), v.begin(), v.end());
}

std::span<const double> TripleIndex::vector(std::size_t i) const {
  if (i >= triples_.size()) throw std::out_of_range("TripleIndex::vector");
  return std::span<const double>(data_).subspan(i * dimension_, dimension_);
}

void TripleIndex::save(std::ostream& out) const {
  out << kMagic << '\n'
      << "fingerprint\t" << fingerprint_ << '\n'
      << "dimension\t" << dimension_ << '\n'
      << "count\t" << triples_.size() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < triples_.size(); ++i) {
    const Triple& t = triples_[i];
    out << t.subject() << '\t' << t.relation() << '\t' << t.object() << '\t';
    auto v = vector(i);
    for (std::size_t d = 0; d < v.size(); ++d) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v[d]);
      if (d) out << ' ';
      out.write(buf, end - buf);
    }
    out << '\n';
  }
}

TripleIndex TripleIndex::load(std::istream& in, std::string_view expected_fingerprint) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw ParseError(1, "not a pgakv index cache");
  }
  std::string fingerprint = header_value(in, 2, "fingerprint");
  if (fingerprint != expected_fingerprint) {
    throw StaleIndexError("index cache fingerprint '" + fingerprint +
                          "' does not match provider '" +
                          std::string(expected_fingerprint) + "'");
  }
  std::size_t dimension = parse_count(header_value(in, 3, "dimension"), 3);
  std::size_t count = parse_count(header_value(in, 4, "count"), 4);

  TripleIndex index(fingerprint, dimension);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t line_no = 5 + i;
    if (!std::getline(in, line)) throw ParseError(line_no, "truncated index cache");
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    std::size_t t3 = t2 == std::string::npos ? t2 : line.find('\t', t2 + 1);
    if (t3 == std::string::npos) throw ParseError(line_no, "expected 4 fields");
    Triple t(std::string_view(line).substr(0, t1),
             std::string_view(line).substr(t1 + 1, t2 - t1 - 1),
             std::string_view(line).substr(t2 + 1, t3 - t2 - 1));
    Vector v;
    v.reserve(dimension);
    const char* p = line.data() + t3 + 1;
    const char* end = line.data() + line.size();
    while (p < end) {
      double x;
      auto [next, ec] = std::from_chars(p, end, x);
      if (ec != std::errc()) throw ParseError(line_no, "bad vector component");
      v.push_back(x);
      p = next;
      if (p < end && *p == ' ') ++p;
    }
    if (v.size() != dimension) {
      throw ParseError(line_no, "vector has " + std::to_string(v.size()) +
                                    " components, expected " +
                                    std::to_string(dimension));
    }
    index.append(t, std::move(v));
  }
  return index;
}

TripleIndex build_index(const Graph& graph, EmbeddingProvider& provider,
                        std::size_t batch_size) {
  if (graph.empty()) throw ContractError("cannot build an index from an empty graph");
  if (batch_size == 0) batch_size = 1;
  TripleIndex index(provider.fingerprint(), provider.dimension());
  const auto& triples = graph.triples();
  for (std::size_t start = 0; start < triples.size(); start += batch_size) {
    std::size_t stop = std::min(triples.size(), start + batch_size);
    std::vector<std::string> texts;
    for (std::size_t i = start; i < stop; ++i) {
      texts.push_back(serialize_for_embedding(triples[i]));
    }
    std::vector<Vector> vectors;
    std::string where = "embedding batch " + std::to_string(start / batch_size) +
                        " (triples " + std::to_string(start) + ".." +
                        std::to_string(stop - 1) + ")";
    try {
      vectors = provider.embed(texts);
    } catch (const std::exception& e) {
      throw ProviderError(where + ": " + e.what());
    }
    if (vectors.size() != texts.size()) {
      throw ProviderError(where + ": provider returned " +
                          std::to_string(vectors.size()) + " vectors");
    }
    for (std::size_t i = start; i < stop; ++i) {
      index.append(triples[i], std::move(vectors[i - start]));
    }
  }
  return index;
}

std::vector<ScoredTriple> top_k_by_vector(const TripleIndex& index,
                                          std::span<const double> probe,
                                          std::size_t k) {
  std::vector<double> scores(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    scores[i] = cosine(probe, index.vector(i));
  }
  std::vector<std::size_t> order(index.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t n = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });
  std::vector<ScoredTriple> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({index.triple(order[i]), scores[order[i]]});
  }
  return out;
}

std::vector<ScoredTriple> query_top_k(const TripleIndex& index, const Triple& probe,
                                      EmbeddingProvider& provider, std::size_t k) {
  return query_text_top_k(index, serialize_for_embedding(probe), provider, k);
}

std::vector<ScoredTriple> query_text_top_k(const TripleIndex& index,
                                           const std::string& text,
                                           EmbeddingProvider& provider,
                                           std::size_t k) {
  check_fingerprint(index, provider);
  auto vectors = provider.embed(std::span<const std::string>(&text, 1));
  if (vectors.size() != 1) throw ProviderError("provider returned no probe vector");
  return top_k_by_vector(index, vectors.front(), k);
}

std::vector<ScoredTriple> build_temp_graph(const TripleIndex& index,
                                           const Graph& pseudo,
                                           EmbeddingProvider& provider,
                                           std::size_t k) {
  if (pseudo.empty()) throw ContractError("temporary graph needs a non-empty pseudo-graph");
  check_fingerprint(index, provider);
  std::vector<std::string> texts;
  for (const auto& t : pseudo) texts.push_back(serialize_for_embedding(t));
  auto probes = provider.embed(texts);
  if (probes.size() != texts.size()) throw ProviderError("provider dropped probe vectors");

  std::vector<ScoredTriple> out;
  std::unordered_map<Triple, std::size_t, TripleHash> position;
  for (const auto& probe : probes) {
    for (auto& hit : top_k_by_vector(index, probe, k)) {
      auto [it, inserted] = position.emplace(hit.triple, out.size());
      if (inserted) {
        out.push_back(std::move(hit));
      } else if (hit.score > out[it->second].score) {
        out[it->second].score = hit.score;
      }
    }
  }
  return out;
}

}  // namespace pgakv
