// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pgakv/error.hpp"

namespace pgakv {

using Vector = std::vector<double>;

class ProviderError : public Error {
 public:
  using Error::Error;
};

/// Maps texts to unit-norm vectors of a fixed dimension. Equal text must map
/// to an equal vector for the lifetime of one provider instance, and
/// fingerprint() must change whenever that mapping could change.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dimension() = 0;
  virtual std::string fingerprint() = 0;
  /// Throws ProviderError.
  virtual std::vector<Vector> embed(std::span<const std::string> texts) = 0;
};

// 64-bit FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Deterministic feature-hashing embedder. Text is lowercased, split on
/// whitespace and stripped of leading/trailing ASCII punctuation per token;
/// each token adds +-1 to one of `dimension` buckets (bucket and sign taken
/// from the token's FNV-1a hash) and the result is L2-normalized.
class HashingEmbedder final : public EmbeddingProvider {
 public:
  static constexpr std::size_t kDefaultDimension = 64;

  explicit HashingEmbedder(std::size_t dimension = kDefaultDimension);

  std::size_t dimension() override { return dimension_; }
  std::string fingerprint() override;
  std::vector<Vector> embed(std::span<const std::string> texts) override;

  Vector embed_one(std::string_view text) const;

 private:
  std::size_t dimension_;
};

std::vector<std::string> hashing_tokens(std::string_view text);

/// Client for a remote embedding endpoint speaking
///   POST <url>  {"texts": [...]}  ->  {"vectors": [[...], ...]}
/// Returned vectors are re-normalized; a zero vector is a ProviderError.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  explicit RemoteEmbedder(std::string url,
                          std::optional<std::size_t> dimension = std::nullopt);

  std::size_t dimension() override;
  std::string fingerprint() override;
  std::vector<Vector> embed(std::span<const std::string> texts) override;

 private:
  std::vector<Vector> post(std::span<const std::string> texts);

  std::string url_;
  std::optional<std::size_t> dimension_;
};

/// Scales `v` to unit L2 norm. Returns false (leaving v untouched) for a zero
/// vector.
bool normalize(Vector& v) noexcept;

}  // namespace pgakv
