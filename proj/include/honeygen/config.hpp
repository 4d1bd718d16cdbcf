#pragma once

// Tool configuration: provider definitions, data paths and defaults. Relative
// paths resolve against the directory of the config file.

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "honeygen/error.hpp"
#include "honeygen/llm_gateway.hpp"
#include "honeygen/text.hpp"

namespace honeygen {

inline constexpr const char* kConfigEnvVar = "HONEYGEN_CONFIG";

struct ConfigPaths {
  std::filesystem::path corpus_dir = "corpus";
  std::filesystem::path wordlist = "data/wordlists/common.txt";
  std::filesystem::path stats;  // empty: built-in corpus statistics
  std::filesystem::path fixtures = "fixtures";
  std::filesystem::path runs = "runs";
  std::filesystem::path refusal_lexicon;  // empty: built-in lexicon
};

struct ConfigDefaults {
  std::size_t k = 20;
  int model_order = 4;
  double smoothing = 1.0;
  std::size_t crawl_parallelism = 8;
  std::size_t sweep_parallelism = 4;
};

struct Config {
  std::vector<llm::ProviderConfig> providers;
  ConfigPaths paths;
  ConfigDefaults defaults;

  const llm::ProviderConfig* provider(std::string_view name) const {
    for (const auto& p : providers)
      if (p.name == name) return &p;
    return nullptr;
  }
};

inline Config config_from_json(const nlohmann::json& j, const std::filesystem::path& base = {}) {
  Config c;
  auto resolve = [&](const nlohmann::json& obj, const char* key, std::filesystem::path& out) {
    if (!obj.contains(key)) return;
    std::filesystem::path p = obj.at(key).get<std::string>();
    out = p.empty() || p.is_absolute() || base.empty() ? p : base / p;
  };
  try {
    for (const auto& p : j.value("providers", nlohmann::json::array()))
      c.providers.push_back(llm::provider_from_json(p));
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      resolve(p, "corpus_dir", c.paths.corpus_dir);
      resolve(p, "wordlist", c.paths.wordlist);
      resolve(p, "stats", c.paths.stats);
      resolve(p, "fixtures", c.paths.fixtures);
      resolve(p, "runs", c.paths.runs);
      resolve(p, "refusal_lexicon", c.paths.refusal_lexicon);
    }
    if (j.contains("defaults")) {
      const auto& d = j.at("defaults");
      c.defaults.k = d.value("k", c.defaults.k);
      c.defaults.model_order = d.value("model_order", c.defaults.model_order);
      c.defaults.smoothing = d.value("smoothing", c.defaults.smoothing);
      c.defaults.crawl_parallelism = d.value("crawl_parallelism", c.defaults.crawl_parallelism);
      c.defaults.sweep_parallelism = d.value("sweep_parallelism", c.defaults.sweep_parallelism);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("config: ") + e.what());
  }
  for (std::size_t i = 0; i < c.providers.size(); ++i)
    for (std::size_t k = i + 1; k < c.providers.size(); ++k)
      if (c.providers[i].name == c.providers[k].name)
        throw Error(ErrorCode::kConfigError, "duplicate provider '" + c.providers[i].name + "'");
  if (c.defaults.k < 1) throw Error(ErrorCode::kConfigError, "defaults.k must be >= 1");
  return c;
}

inline Config load_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kConfigError, path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

// Explicit path first, then $HONEYGEN_CONFIG, else defaults.
inline Config resolve_config(const std::optional<std::filesystem::path>& explicit_path) {
  if (explicit_path && !explicit_path->empty()) return load_config(*explicit_path);
  if (const char* env = std::getenv(kConfigEnvVar); env != nullptr && *env != '\0')
    return load_config(env);
  return {};
}

}  // namespace honeygen
