// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pgakv/error.hpp"
#include "pgakv/pruning.hpp"

namespace pgakv {

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class CassetteModeSetting { kNone, kReplay, kRecord };

struct AppConfig {
  std::string kg;
  std::string index;
  std::string provider = "builtin-hash";  // or an http(s) URL
  std::string llm_url;
  std::string model;
  std::string cassette;
  CassetteModeSetting mode = CassetteModeSetting::kNone;
  double threshold = kDefaultConfidenceThreshold;
  std::size_t topk = kDefaultRetrievalTopK;
  std::size_t concurrency = 1;
  std::uint64_t seed = 0;
  std::size_t max_retries = 2;
};

/// key -> raw value. Keys are the long flag names: kg, index, provider,
/// llm-url, model, cassette, mode, threshold, topk, concurrency, seed,
/// max-retries.
using Settings = std::map<std::string, std::string>;

bool is_config_key(std::string_view key);

/// Flat `key = value` lines; '#' starts a comment line. Unknown keys and
/// lines without '=' throw ConfigError naming the line.
Settings parse_config_file(std::istream& in);

/// PGAKV_<KEY> with '-' mapped to '_' (PGAKV_LLM_URL, ...).
using EnvLookup = std::function<const char*(const char*)>;
Settings settings_from_env(const EnvLookup& getenv);

/// Overwrites the fields named in `s`. Throws ConfigError on a malformed or
/// out-of-range value, naming `source`.
void apply(AppConfig& cfg, const Settings& s, std::string_view source);

nlohmann::json to_json(const AppConfig& cfg);

}  // namespace pgakv
