#include "budgetcot/config.hpp"

#include <cstdlib>
#include <fstream>

#include <fmt/format.h>

namespace budgetcot {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  return p.is_relative() && !base.empty() ? base / p : p;
}

template <class T>
T field(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config field '{}': {}", key, e.what()));
  }
}

}  // namespace

HarnessConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  HarnessConfig cfg;
  cfg.hash = sha256_hex(doc.dump());

  if (!doc.contains("backend")) throw ConfigError("config has no backend section");
  const auto& backend = doc.at("backend");
  const auto kind = field<std::string>(backend, "kind", "");
  if (kind == "live") {
    cfg.backend.kind = BackendSection::Kind::live;
    cfg.backend.endpoint = field<std::string>(backend, "endpoint", "");
    cfg.backend.api_key_env = field<std::string>(backend, "api_key_env", "");
    cfg.backend.model_id = field<std::string>(backend, "model_id", "");
    if (cfg.backend.endpoint.empty()) throw ConfigError("live backend needs an endpoint");
    if (cfg.backend.model_id.empty()) throw ConfigError("live backend needs a model_id");
    if (backend.contains("api_key"))
      throw ConfigError("put the API key in an environment variable named by api_key_env");
  } else if (kind == "scripted") {
    cfg.backend.kind = BackendSection::Kind::scripted;
    const auto script = field<std::string>(backend, "script", "");
    if (script.empty()) throw ConfigError("scripted backend needs a script file");
    cfg.backend.script = resolve(base_dir, script);
    cfg.backend.model_id = field<std::string>(backend, "model_id", "");
  } else {
    throw ConfigError(fmt::format("backend.kind must be live or scripted, got '{}'", kind));
  }

  if (doc.contains("pricing")) {
    for (const auto& entry : doc.at("pricing")) {
      PricingTable table;
      table.model_id = field<std::string>(entry, "model_id", "");
      table.input_price = field<double>(entry, "input_price", -1.0);
      table.output_price = field<double>(entry, "output_price", -1.0);
      if (table.model_id.empty()) throw ConfigError("pricing entry without model_id");
      cfg.pricing.add(std::move(table));
    }
  }

  if (doc.contains("sampling")) {
    const auto& s = doc.at("sampling");
    cfg.sampling.temperature = field<double>(s, "temperature", cfg.sampling.temperature);
    cfg.sampling.seed = field<std::int64_t>(s, "seed", cfg.sampling.seed);
    cfg.sampling.max_candidates = field<int>(s, "max_candidates", cfg.sampling.max_candidates);
    if (cfg.sampling.temperature < 0) throw ConfigError("sampling.temperature must be >= 0");
    if (cfg.sampling.max_candidates < 1) throw ConfigError("sampling.max_candidates must be >= 1");
  }

  const auto concurrency = field<long long>(doc, "concurrency", 4);
  if (concurrency < 1) throw ConfigError("concurrency must be >= 1");
  cfg.concurrency = static_cast<unsigned>(concurrency);

  if (doc.contains("retry")) {
    const auto& r = doc.at("retry");
    cfg.retry.max_attempts = field<int>(r, "max_attempts", cfg.retry.max_attempts);
    cfg.retry.initial_backoff = std::chrono::milliseconds(
        field<std::int64_t>(r, "initial_backoff_ms", cfg.retry.initial_backoff.count()));
    cfg.retry.max_backoff = std::chrono::milliseconds(
        field<std::int64_t>(r, "max_backoff_ms", cfg.retry.max_backoff.count()));
    cfg.retry.jitter = field<bool>(r, "jitter", cfg.retry.jitter);
    if (cfg.retry.max_attempts < 1) throw ConfigError("retry.max_attempts must be >= 1");
  }

  if (doc.contains("rate_limit")) {
    const auto& r = doc.at("rate_limit");
    cfg.rate_limit.requests_per_second = field<double>(r, "requests_per_second", 0.0);
    cfg.rate_limit.burst = field<double>(r, "burst", 1.0);
  }

  if (doc.contains("templates")) {
    const auto& t = doc.at("templates");
    auto& tpl = cfg.templates;
    tpl.vanilla_cot = field<std::string>(t, "vanilla_cot", tpl.vanilla_cot);
    tpl.budgeted_cot = field<std::string>(t, "budgeted_cot", tpl.budgeted_cot);
    tpl.estimation_task = field<std::string>(t, "estimation_task", tpl.estimation_task);
    tpl.estimation_contract = field<std::string>(t, "estimation_contract", tpl.estimation_contract);
    tpl.direct_answer = field<std::string>(t, "direct_answer", tpl.direct_answer);
    tpl.format_instruction = field<std::string>(t, "format_instruction", tpl.format_instruction);
  }
  cfg.templates.validate();

  if (doc.contains("output_dir"))
    cfg.output_dir = resolve(base_dir, field<std::string>(doc, "output_dir", "out"));
  if (doc.contains("cache_file"))
    cfg.cache_file = resolve(base_dir, field<std::string>(doc, "cache_file", ""));
  return cfg;
}

HarnessConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config {}", path.string()));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config {} is not valid JSON: {}", path.string(), e.what()));
  }
  return parse_config(doc, path.parent_path());
}

std::string resolve_api_key(const BackendSection& backend) {
  if (backend.api_key_env.empty()) return {};
  const char* value = std::getenv(backend.api_key_env.c_str());
  if (!value || !*value)
    throw ConfigError(fmt::format("environment variable {} is not set", backend.api_key_env));
  return value;
}

}  // namespace budgetcot
