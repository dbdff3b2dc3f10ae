#include "budgetcot/response_cache.hpp"

#include <fmt/format.h>

#include "budgetcot/serialize.hpp"

namespace budgetcot {

ResponseCache::ResponseCache(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());

  bool needs_newline = false;
  if (std::ifstream in(path_, std::ios::binary); in) {
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        const auto record = json::parse(line);
        auto outcome = record.at("outcome").get<CompletionOutcome>();
        entries_.insert_or_assign(record.at("fingerprint").get<std::string>(), std::move(outcome));
      } catch (const json::exception&) {
        // torn line from an interrupted writer
      }
    }
    in.clear();
    in.seekg(0, std::ios::end);
    if (in.tellg() > 0) {
      in.seekg(-1, std::ios::end);
      needs_newline = in.get() != '\n';
    }
  }

  out_.open(path_, std::ios::app);
  if (!out_) throw ConfigError(fmt::format("cannot open cache file {}", path_.string()));
  if (needs_newline) out_ << '\n';
}

std::optional<CompletionOutcome> ResponseCache::find(const std::string& fingerprint) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(fingerprint);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::append(const CompletionOutcome& outcome) {
  const json record = {{"fingerprint", outcome.request_fingerprint}, {"outcome", outcome}};
  std::unique_lock lock(mutex_);
  if (entries_.count(outcome.request_fingerprint)) return;
  out_ << record.dump() << '\n';
  out_.flush();
  entries_.emplace(outcome.request_fingerprint, outcome);
}

std::size_t ResponseCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

CompletionOutcome CachingBackend::complete(const ChatPrompt& prompt,
                                           const SamplingParams& params) {
  const auto fingerprint = request_fingerprint(upstream_.model_id(), prompt, params);
  if (auto hit = cache_.find(fingerprint)) return *hit;

  std::promise<CompletionOutcome> promise;
  {
    std::unique_lock lock(inflight_mutex_);
    if (auto hit = cache_.find(fingerprint)) return *hit;
    if (auto it = inflight_.find(fingerprint); it != inflight_.end()) {
      auto shared = it->second;
      lock.unlock();
      return shared.get();
    }
    inflight_.emplace(fingerprint, promise.get_future().share());
  }

  auto finish = [&] {
    std::lock_guard lock(inflight_mutex_);
    inflight_.erase(fingerprint);
  };
  try {
    auto outcome = upstream_.complete(prompt, params);
    outcome.request_fingerprint = fingerprint;
    cache_.append(outcome);
    promise.set_value(outcome);
    finish();
    return outcome;
  } catch (...) {
    promise.set_exception(std::current_exception());
    finish();
    throw;
  }
}

}  // namespace budgetcot
