#include "budgetcot/live_backend.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "budgetcot/serialize.hpp"

namespace budgetcot {

RateLimiter::RateLimiter(double requests_per_second, double burst)
    : rate_(requests_per_second),
      burst_(std::max(1.0, burst)),
      tokens_(std::max(1.0, burst)),
      last_(Clock::now()) {}

void RateLimiter::acquire() {
  if (rate_ <= 0) return;
  std::chrono::duration<double> wait{0};
  {
    std::lock_guard lock(mutex_);
    const auto now = Clock::now();
    tokens_ = std::min(burst_, tokens_ + std::chrono::duration<double>(now - last_).count() * rate_);
    last_ = now;
    tokens_ -= 1.0;
    // A negative balance is a reservation: this caller waits until it is repaid.
    if (tokens_ < 0) wait = std::chrono::duration<double>(-tokens_ / rate_);
  }
  if (wait.count() > 0) std::this_thread::sleep_for(wait);
}

OpenAiChatBackend::OpenAiChatBackend(LiveBackendConfig config, RateLimiter& limiter)
    : config_(std::move(config)), limiter_(limiter), rng_(config_.jitter_seed) {
  if (config_.retry.max_attempts < 1) throw ConfigError("retry.max_attempts must be >= 1");
  const auto scheme_end = config_.endpoint.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError(fmt::format("endpoint '{}' has no scheme", config_.endpoint));
  const auto path_start = config_.endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    scheme_host_port_ = config_.endpoint;
    path_ = "/v1/chat/completions";
  } else {
    scheme_host_port_ = config_.endpoint.substr(0, path_start);
    path_ = config_.endpoint.substr(path_start);
  }
}

std::string OpenAiChatBackend::request_body(const ChatPrompt& prompt,
                                            const SamplingParams& params) const {
  json messages = json::array();
  if (!prompt.system.empty()) messages.push_back({{"role", "system"}, {"content", prompt.system}});
  messages.push_back({{"role", "user"}, {"content", prompt.user}});
  json body = {{"model", config_.model_id},
               {"messages", std::move(messages)},
               {"temperature", params.temperature},
               {"seed", params.seed}};
  if (params.max_candidates != 1) body["n"] = params.max_candidates;
  return body.dump();
}

CompletionOutcome OpenAiChatBackend::parse_response(const std::string& body,
                                                    const ChatPrompt& prompt,
                                                    const std::string& model_id) {
  json payload;
  try {
    payload = json::parse(body);
  } catch (const json::exception& e) {
    throw ProtocolError(fmt::format("response is not JSON: {}", e.what()), body);
  }

  CompletionOutcome outcome;
  outcome.model_id = model_id;
  try {
    const auto& content = payload.at("choices").at(0).at("message").at("content");
    outcome.text = content.is_null() ? std::string() : content.get<std::string>();
  } catch (const json::exception& e) {
    throw ProtocolError(fmt::format("response lacks choices[0].message.content: {}", e.what()),
                        body);
  }

  const auto usage = payload.find("usage");
  if (usage != payload.end() && usage->is_object() && usage->contains("prompt_tokens") &&
      usage->contains("completion_tokens") && usage->at("prompt_tokens").is_number_integer() &&
      usage->at("completion_tokens").is_number_integer()) {
    outcome.usage.input_tokens = usage->at("prompt_tokens").get<std::int64_t>();
    outcome.usage.output_tokens = usage->at("completion_tokens").get<std::int64_t>();
    outcome.usage.counting_source = CountingSource::provider_reported;
  } else {
    outcome.usage.input_tokens = count_tokens_approx(prompt.system) + count_tokens_approx(prompt.user);
    outcome.usage.output_tokens = count_tokens_approx(outcome.text);
    outcome.usage.counting_source = CountingSource::local_approximation;
  }
  return outcome;
}

std::chrono::milliseconds OpenAiChatBackend::backoff(int attempt) {
  double delay = static_cast<double>(config_.retry.initial_backoff.count()) * std::pow(2.0, attempt);
  delay = std::min(delay, static_cast<double>(config_.retry.max_backoff.count()));
  if (config_.retry.jitter) {
    std::lock_guard lock(rng_mutex_);
    delay *= std::uniform_real_distribution<double>(0.5, 1.5)(rng_);
  }
  return std::chrono::milliseconds(static_cast<std::int64_t>(delay));
}

CompletionOutcome OpenAiChatBackend::complete(const ChatPrompt& prompt,
                                              const SamplingParams& params) {
  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);

  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
  const auto body = request_body(prompt, params);

  std::string last_problem;
  bool rate_limited = false;
  for (int attempt = 0; attempt < config_.retry.max_attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(backoff(attempt - 1));
    limiter_.acquire();

    auto result = client.Post(path_, headers, body, "application/json");
    if (!result) {
      rate_limited = false;
      last_problem = httplib::to_string(result.error());
      continue;
    }
    const int status = result->status;
    if (status == 429) {
      rate_limited = true;
      last_problem = "HTTP 429";
      continue;
    }
    if (status >= 500) {
      rate_limited = false;
      last_problem = fmt::format("HTTP {}", status);
      continue;
    }
    if (status != 200)
      throw ProtocolError(fmt::format("HTTP {} from {}", status, config_.endpoint), result->body);
    return parse_response(result->body, prompt, config_.model_id);
  }

  const auto message = fmt::format("{} after {} attempts against {}", last_problem,
                                   config_.retry.max_attempts, config_.endpoint);
  if (rate_limited) throw RateLimitError(message);
  throw TransportError(message);
}

}  // namespace budgetcot
