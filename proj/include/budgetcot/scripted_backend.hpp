#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "budgetcot/backend.hpp"
#include "budgetcot/serialize.hpp"

namespace budgetcot {

/// One scripted reply. When `text` is unset the mock synthesizes a response
/// ending in "The answer is ..." that grades as `correct`.
struct ScriptedResponse {
  std::optional<std::string> text;
  std::int64_t output_tokens = 0;
  bool correct = true;
};

/// Token-cost curve T(x, budget) for one question, keyed by requested budget.
struct ScriptedBehavior {
  Question question;
  std::map<std::int64_t, ScriptedResponse> cost_curve;
  /// Vanilla CoT (no budget in the prompt).
  std::optional<ScriptedResponse> no_budget;
  std::optional<ScriptedResponse> direct;
  /// Reply to the budget-estimation prompt; `text` should carry the estimate.
  std::optional<ScriptedResponse> estimation;
  ScriptedResponse default_response{std::nullopt, 1, false};
};

struct ScriptedScript {
  std::string model_id = "scripted-mock";
  std::vector<ScriptedBehavior> behaviors;
};

void to_json(json& j, const ScriptedResponse& r);
void from_json(const json& j, ScriptedResponse& r);
void to_json(json& j, const ScriptedBehavior& b);
void from_json(const json& j, ScriptedBehavior& b);
void to_json(json& j, const ScriptedScript& s);
void from_json(const json& j, ScriptedScript& s);

ScriptedScript load_scripted_script(const std::filesystem::path& path);

/// Deterministic in-process backend. Routes each prompt to the behavior whose
/// question text it contains, then to the curve entry for the prompt's budget.
/// Reported output_tokens always equal the scripted count.
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(ScriptedScript script, PromptTemplates templates = {});

  CompletionOutcome complete(const ChatPrompt& prompt, const SamplingParams& params) override;
  const std::string& model_id() const override { return script_.model_id; }

  /// Number of completions served so far.
  std::size_t calls() const noexcept { return calls_.load(); }
  /// How many times each fingerprint has been requested.
  std::map<std::string, std::size_t> calls_by_fingerprint() const;

  /// After `n` more successful calls, every call throws TransportError.
  void fail_after(std::optional<std::size_t> n);

  const ScriptedScript& script() const noexcept { return script_; }

 private:
  const ScriptedBehavior& route(const ChatPrompt& prompt) const;
  const ScriptedResponse& select(const ScriptedBehavior& behavior, const ChatPrompt& prompt) const;

  ScriptedScript script_;
  PromptTemplates templates_;
  std::atomic<std::size_t> calls_{0};
  mutable std::mutex mutex_;
  std::map<std::string, std::size_t> by_fingerprint_;
  std::optional<std::size_t> remaining_before_failure_;
};

/// Text the mock uses for a reply without explicit text.
std::string synthesize_response(const Question& question, bool correct);

}  // namespace budgetcot
