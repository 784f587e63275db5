// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors
//
// Exact full-scan cosine index over embedded KG triples.

#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pgakv/embedding.hpp"
#include "pgakv/graph.hpp"

namespace pgakv {

class StaleIndexError : public Error {
 public:
  using Error::Error;
};

struct ScoredTriple {
  Triple triple;
  double score;

  friend bool operator==(const ScoredTriple&, const ScoredTriple&) = default;
};

/// "<subject> <relation> <object>".
std::string serialize_for_embedding(const Triple& t);

/// dot(a, b) / (|a| |b|). Throws ContractError on a dimension mismatch or a
/// zero vector.
double cosine(std::span<const double> a, std::span<const double> b);

class TripleIndex {
 public:
  TripleIndex(std::string fingerprint, std::size_t dimension);

  /// `v.size()` must equal dimension().
  void append(const Triple& t, Vector v);

  const std::string& fingerprint() const noexcept { return fingerprint_; }
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return triples_.size(); }
  const Triple& triple(std::size_t i) const { return triples_.at(i); }
  std::span<const double> vector(std::size_t i) const;

  /// Text cache format: header lines, then one
  /// "subject\trelation\tobject\tv0 v1 ... vN" record per entry. Numbers use
  /// the shortest round-trip decimal form, so saving is byte-stable.
  void save(std::ostream& out) const;

  /// Throws StaleIndexError when the stored fingerprint differs from
  /// `expected_fingerprint`, ParseError on a malformed cache.
  static TripleIndex load(std::istream& in, std::string_view expected_fingerprint);

  friend bool operator==(const TripleIndex&, const TripleIndex&) = default;

 private:
  std::string fingerprint_;
  std::size_t dimension_;
  std::vector<Triple> triples_;
  std::vector<double> data_;  // row-major, size() * dimension_
};

/// Embeds every triple of `graph` in batches of `batch_size`. Provider
/// failures are rethrown as ProviderError naming the failing batch.
TripleIndex build_index(const Graph& graph, EmbeddingProvider& provider,
                        std::size_t batch_size = 256);

/// Highest-cosine entries for an already-embedded probe, descending, ties by
/// insertion order.
std::vector<ScoredTriple> top_k_by_vector(const TripleIndex& index,
                                          std::span<const double> probe,
                                          std::size_t k);

std::vector<ScoredTriple> query_top_k(const TripleIndex& index, const Triple& probe,
                                      EmbeddingProvider& provider, std::size_t k = 10);

/// Top-k for free text (the RAG baseline embeds the question itself).
std::vector<ScoredTriple> query_text_top_k(const TripleIndex& index,
                                           const std::string& text,
                                           EmbeddingProvider& provider,
                                           std::size_t k = 10);

/// Union of per-probe top-k results for every triple of `pseudo`. A triple hit
/// by several probes appears once, at its first position, with its maximum
/// score.
std::vector<ScoredTriple> build_temp_graph(const TripleIndex& index,
                                           const Graph& pseudo,
                                           EmbeddingProvider& provider,
                                           std::size_t k = 10);

}  // namespace pgakv
