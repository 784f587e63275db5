// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors

#include "pgakv/pruning.hpp"

#include <algorithm>
#include <map>

namespace pgakv {

namespace {

struct SubjectStats {
  std::size_t count = 0;
  double max_score = -2.0;
};

}  // namespace

std::set<std::string> candidate_selection(std::span<const ScoredTriple> temp,
                                          std::size_t k) {
  if (k == 0) throw ContractError("candidate selection needs k >= 1");
  std::map<std::string, SubjectStats> stats;
  for (const auto& st : temp) {
    auto& s = stats[st.triple.subject()];
    ++s.count;
    s.max_score = std::max(s.max_score, st.score);
  }
  std::vector<std::pair<std::string, SubjectStats>> ranked(stats.begin(), stats.end());
  // `stats` is already label-ordered, so a stable sort settles the last tie.
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second.count != b.second.count) return a.second.count > b.second.count;
    return a.second.max_score > b.second.max_score;
  });
  std::set<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) out.insert(ranked[i].first);
  return out;
}

EntityConfidence entity_confidence(std::span<const ScoredTriple> temp,
                                   const std::string& subject) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& st : temp) {
    if (st.triple.subject() != subject) continue;
    sum += st.score;
    ++n;
  }
  if (n == 0) throw NotFoundError("subject '" + subject + "' not in temporary graph");
  return {subject, sum / static_cast<double>(n), n};
}

PruneResult prune(std::span<const ScoredTriple> temp, const Graph& pseudo,
                  const PruneConfig& cfg) {
  if (cfg.confidence_threshold < -1.0 || cfg.confidence_threshold > 1.0) {
    throw ContractError("confidence threshold must lie in [-1, 1]");
  }
  PruneResult result;
  std::size_t k = cfg.k_override.value_or(subjects(pseudo).size());
  if (k == 0 || temp.empty()) return result;

  std::set<std::string> kept;
  for (const auto& subject : candidate_selection(temp, k)) {
    EntityConfidence ec = entity_confidence(temp, subject);
    if (ec.confidence >= cfg.confidence_threshold) {
      kept.insert(subject);
      result.confidences.push_back(std::move(ec));
    }
  }
  std::stable_sort(result.confidences.begin(), result.confidences.end(),
                   [](const EntityConfidence& a, const EntityConfidence& b) {
                     return a.confidence > b.confidence;
                   });
  for (const auto& st : temp) {
    if (kept.contains(st.triple.subject())) result.ground_truth.add(st.triple);
  }
  return result;
}

}  // namespace pgakv
