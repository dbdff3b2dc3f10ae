#pragma once

// Harness configuration file (JSON). Secrets never live in the file: a live
// backend names the environment variable that holds its API key.
//
// {
//   "backend": {"kind": "live", "endpoint": "https://api.openai.com/v1/chat/completions",
//               "api_key_env": "OPENAI_API_KEY", "model_id": "gpt-4o-mini"},
//   "backend": {"kind": "scripted", "script": "fixtures/cohort.json"},
//   "pricing": [{"model_id": "gpt-4o-mini", "input_price": 0.15, "output_price": 0.60}],
//   "sampling": {"temperature": 0.1, "seed": 1024, "max_candidates": 1},
//   "concurrency": 4,
//   "retry": {"max_attempts": 5, "initial_backoff_ms": 1000, "max_backoff_ms": 60000, "jitter": true},
//   "rate_limit": {"requests_per_second": 5, "burst": 5},
//   "templates": {"budgeted_cot": "... {budget} ..."},
//   "output_dir": "runs/latest",
//   "cache_file": "runs/cache.jsonl"
// }

#include <filesystem>
#include <optional>
#include <string>

#include "budgetcot/backend.hpp"
#include "budgetcot/live_backend.hpp"
#include "budgetcot/prompting.hpp"
#include "budgetcot/serialize.hpp"

namespace budgetcot {

struct BackendSection {
  enum class Kind { live, scripted };
  Kind kind = Kind::scripted;
  std::string endpoint;
  std::string api_key_env;
  std::string model_id;
  /// Scripted behavior file, resolved against the config file's directory.
  std::filesystem::path script;
};

struct RateLimitSection {
  double requests_per_second = 0.0;
  double burst = 1.0;
};

struct HarnessConfig {
  BackendSection backend;
  PricingBook pricing;
  SamplingParams sampling;
  unsigned concurrency = 4;
  RetryPolicy retry;
  RateLimitSection rate_limit;
  PromptTemplates templates;
  std::filesystem::path output_dir = "out";
  std::optional<std::filesystem::path> cache_file;
  /// SHA-256 of the canonical JSON of the file.
  std::string hash;
};

/// Throws ConfigError on any invalid field. Relative paths resolve against `base_dir`.
HarnessConfig parse_config(const json& doc, const std::filesystem::path& base_dir = {});
HarnessConfig load_config(const std::filesystem::path& path);

/// Reads the API key named by `backend.api_key_env`; throws ConfigError when unset.
std::string resolve_api_key(const BackendSection& backend);

}  // namespace budgetcot
