#pragma once

#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "budgetcot/backend.hpp"

namespace budgetcot {

/// Append-only JSONL store of completions keyed by request fingerprint.
/// Each line is {"fingerprint": ..., "outcome": {...}}. A torn final line
/// (interrupted writer) is ignored on load.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path path);

  std::optional<CompletionOutcome> find(const std::string& fingerprint) const;
  void append(const CompletionOutcome& outcome);

  std::size_t size() const;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, CompletionOutcome> entries_;
  std::ofstream out_;
};

/// Serves repeated requests from a ResponseCache. Concurrent identical
/// requests share one upstream call.
class CachingBackend : public Backend {
 public:
  CachingBackend(Backend& upstream, ResponseCache& cache) : upstream_(upstream), cache_(cache) {}

  CompletionOutcome complete(const ChatPrompt& prompt, const SamplingParams& params) override;
  const std::string& model_id() const override { return upstream_.model_id(); }

 private:
  Backend& upstream_;
  ResponseCache& cache_;
  std::mutex inflight_mutex_;
  std::map<std::string, std::shared_future<CompletionOutcome>> inflight_;
};

}  // namespace budgetcot
