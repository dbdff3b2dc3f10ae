#pragma once

// Uniform completion interface. Concrete backends: ScriptedBackend (deterministic
// test double), OpenAiChatBackend (live HTTP), CachingBackend (JSONL-backed decorator).

#include <cstdint>
#include <optional>
#include <string>

#include "budgetcot/core.hpp"
#include "budgetcot/prompting.hpp"

namespace budgetcot {

struct SamplingParams {
  double temperature = 0.1;
  std::int64_t seed = 1024;
  /// Number of reasoning paths requested. Only a single path is ever consumed.
  int max_candidates = 1;
};

/// Stable hash over everything that determines a response: model, prompt and sampling.
std::string request_fingerprint(const std::string& model_id, const ChatPrompt& prompt,
                                const SamplingParams& params);

class Backend {
 public:
  virtual ~Backend() = default;

  /// Safe to call concurrently. Throws TransportError, RateLimitError or ProtocolError.
  virtual CompletionOutcome complete(const ChatPrompt& prompt, const SamplingParams& params) = 0;

  virtual const std::string& model_id() const = 0;
};

/// Budget carried by a budgeted CoT prompt, or nullopt for "no budget".
/// Matches the configured template first, then any "use less than N tokens".
std::optional<Budget> classify_prompt_budget(
    const ChatPrompt& prompt, const PromptTemplates& templates = default_templates());

}  // namespace budgetcot
