// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors
//
// Two-step pruning of the retrieved temporary graph into the ground-truth
// graph: keep the k subjects that head the most retrieved triples, then drop
// subjects whose mean retrieval score (entity confidence) is below a
// threshold.

#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pgakv/graph.hpp"
#include "pgakv/index.hpp"

namespace pgakv {

inline constexpr double kDefaultConfidenceThreshold = 0.7;
inline constexpr std::size_t kDefaultRetrievalTopK = 10;

struct EntityConfidence {
  std::string subject;
  double confidence;    // mean score of the subject's triples
  std::size_t support;  // number of those triples

  friend bool operator==(const EntityConfidence&, const EntityConfidence&) = default;
};

struct PruneConfig {
  double confidence_threshold = kDefaultConfidenceThreshold;
  // Replaces k = |subjects(pseudo)| when set.
  std::optional<std::size_t> k_override;
};

/// The k subjects with the most triples in `temp`; ties go to the higher
/// maximum triple score, then to the lexicographically smaller label.
/// Throws ContractError when k == 0.
std::set<std::string> candidate_selection(std::span<const ScoredTriple> temp,
                                          std::size_t k);

/// Throws NotFoundError if `subject` heads no triple in `temp`.
EntityConfidence entity_confidence(std::span<const ScoredTriple> temp,
                                   const std::string& subject);

struct PruneResult {
  Graph ground_truth{Stage::kGroundTruth};
  // Surviving subjects, highest confidence first (ties by label).
  std::vector<EntityConfidence> confidences;
};

/// Candidate selection with k = |subjects(pseudo)| (or the override), then a
/// confidence >= threshold filter. Kept triples retain their order in `temp`.
PruneResult prune(std::span<const ScoredTriple> temp, const Graph& pseudo,
                  const PruneConfig& cfg = {});

}  // namespace pgakv
