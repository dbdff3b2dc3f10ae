#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <random>
#include <string>

#include "budgetcot/backend.hpp"

namespace budgetcot {

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_backoff{1000};
  std::chrono::milliseconds max_backoff{60000};
  /// Scales each delay by a factor drawn uniformly from [0.5, 1.5).
  bool jitter = true;
};

/// Token bucket shared by every request of a backend. A non-positive rate disables it.
class RateLimiter {
 public:
  RateLimiter(double requests_per_second, double burst);

  /// Blocks until a request slot is available.
  void acquire();

 private:
  using Clock = std::chrono::steady_clock;

  double rate_;
  double burst_;
  double tokens_;
  Clock::time_point last_;
  std::mutex mutex_;
};

struct LiveBackendConfig {
  /// Full chat-completions URL, e.g. https://api.openai.com/v1/chat/completions.
  std::string endpoint;
  std::string api_key;
  std::string model_id;
  RetryPolicy retry;
  std::chrono::seconds timeout{120};
  std::uint64_t jitter_seed = 1024;
};

/// Client for an OpenAI-compatible chat completions endpoint.
class OpenAiChatBackend : public Backend {
 public:
  OpenAiChatBackend(LiveBackendConfig config, RateLimiter& limiter);

  CompletionOutcome complete(const ChatPrompt& prompt, const SamplingParams& params) override;
  const std::string& model_id() const override { return config_.model_id; }

  /// Request body sent for `prompt`; exposed for wire-format tests.
  std::string request_body(const ChatPrompt& prompt, const SamplingParams& params) const;

  /// Parses a chat completions response body. Throws ProtocolError.
  static CompletionOutcome parse_response(const std::string& body, const ChatPrompt& prompt,
                                          const std::string& model_id);

 private:
  std::chrono::milliseconds backoff(int attempt);

  LiveBackendConfig config_;
  RateLimiter& limiter_;
  std::string scheme_host_port_;
  std::string path_;
  std::mutex rng_mutex_;
  std::mt19937_64 rng_;
};

}  // namespace budgetcot
