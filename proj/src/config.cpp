// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors

#include "pgakv/config.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "pgakv/graph.hpp"

namespace pgakv {

namespace {

constexpr std::array<std::string_view, 12> kKeys = {
    "kg",        "index", "provider",    "llm-url", "model", "cassette",
    "mode",      "threshold", "topk", "concurrency", "seed", "max-retries"};

template <typename T>
T parse_number(const std::string& key, const std::string& value, std::string_view source) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError(std::string(source) + ": invalid value for " + key + ": '" + value + "'");
  }
  return out;
}

}  // namespace

bool is_config_key(std::string_view key) {
  for (auto k : kKeys) {
    if (k == key) return true;
  }
  return false;
}

Settings parse_config_file(std::istream& in) {
  Settings out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(n) + ": expected key = value");
    }
    std::string key(trim(t.substr(0, eq)));
    if (!is_config_key(key)) {
      throw ConfigError("config line " + std::to_string(n) + ": unknown key '" + key + "'");
    }
    out[key] = std::string(trim(t.substr(eq + 1)));
  }
  return out;
}

Settings settings_from_env(const EnvLookup& getenv) {
  Settings out;
  for (auto k : kKeys) {
    std::string name = "PGAKV_";
    for (char c : k) name += c == '-' ? '_' : static_cast<char>(std::toupper(c));
    if (const char* v = getenv(name.c_str()); v != nullptr && *v != '\0') {
      out[std::string(k)] = v;
    }
  }
  return out;
}

void apply(AppConfig& cfg, const Settings& s, std::string_view source) {
  for (const auto& [key, value] : s) {
    if (key == "kg") {
      cfg.kg = value;
    } else if (key == "index") {
      cfg.index = value;
    } else if (key == "provider") {
      cfg.provider = value;
    } else if (key == "llm-url") {
      cfg.llm_url = value;
    } else if (key == "model") {
      cfg.model = value;
    } else if (key == "cassette") {
      cfg.cassette = value;
    } else if (key == "mode") {
      if (value == "replay") {
        cfg.mode = CassetteModeSetting::kReplay;
      } else if (value == "record") {
        cfg.mode = CassetteModeSetting::kRecord;
      } else if (value == "none" || value.empty()) {
        cfg.mode = CassetteModeSetting::kNone;
      } else {
        throw ConfigError(std::string(source) + ": mode must be replay or record");
      }
    } else if (key == "threshold") {
      double t = parse_number<double>(key, value, source);
      if (!std::isfinite(t) || t < -1.0 || t > 1.0) {
        throw ConfigError(std::string(source) + ": threshold must lie in [-1, 1]");
      }
      cfg.threshold = t;
    } else if (key == "topk") {
      cfg.topk = parse_number<std::size_t>(key, value, source);
      if (cfg.topk == 0) throw ConfigError(std::string(source) + ": topk must be positive");
    } else if (key == "concurrency") {
      cfg.concurrency = parse_number<std::size_t>(key, value, source);
      if (cfg.concurrency == 0) {
        throw ConfigError(std::string(source) + ": concurrency must be positive");
      }
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(key, value, source);
    } else if (key == "max-retries") {
      cfg.max_retries = parse_number<std::size_t>(key, value, source);
    } else {
      throw ConfigError(std::string(source) + ": unknown key '" + key + "'");
    }
  }
}

nlohmann::json to_json(const AppConfig& cfg) {
  auto opt = [](const std::string& s) {
    return s.empty() ? nlohmann::json(nullptr) : nlohmann::json(s);
  };
  const char* mode = cfg.mode == CassetteModeSetting::kReplay   ? "replay"
                     : cfg.mode == CassetteModeSetting::kRecord ? "record"
                                                                : "none";
  return nlohmann::json{{"kg", opt(cfg.kg)},
                        {"index", opt(cfg.index)},
                        {"provider", cfg.provider},
                        {"llm_url", opt(cfg.llm_url)},
                        {"model", opt(cfg.model)},
                        {"cassette", opt(cfg.cassette)},
                        {"mode", mode},
                        {"threshold", cfg.threshold},
                        {"topk", cfg.topk},
                        {"concurrency", cfg.concurrency},
                        {"seed", cfg.seed},
                        {"max_retries", cfg.max_retries}};
}

}  // namespace pgakv
