#pragma once

// Estimate-then-prompt: ask the model for a token budget with a zero-shot
// estimation prompt, optionally scale it, then answer under that budget.

#include <optional>
#include <string>

#include "budgetcot/backend.hpp"
#include "budgetcot/grading.hpp"
#include "budgetcot/prompting.hpp"

namespace budgetcot {

/// Estimates are clamped to [1, kMaxEstimatedBudget].
inline constexpr std::int64_t kMaxEstimatedBudget = 1'000'000'000;

struct EstimatedBudget {
  Budget value;
  std::string raw_response;
  std::string parse_rule;
};

/// First integer in `response` ("1,200" reads as 1200), clamped to >= 1.
/// Throws EstimationParseError when the response holds no digits.
EstimatedBudget parse_budget_estimate(const std::string& response);

struct EpOptions {
  SamplingParams sampling;
  PromptTemplates templates;
};

EstimatedBudget estimate_budget(Backend& backend, const Question& question,
                                const EpOptions& options = {});

/// max(1, round(alpha * estimate)). Throws DomainError unless alpha > 0.
Budget scale_budget(const EstimatedBudget& estimate, double alpha);

/// Backend failure inside the pipeline, labelled "estimation" or "answer".
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what, std::exception_ptr cause)
      : Error(stage + ": " + what), stage_(std::move(stage)), cause_(std::move(cause)) {}
  const std::string& stage() const noexcept { return stage_; }
  std::exception_ptr cause() const noexcept { return cause_; }

 private:
  std::string stage_;
  std::exception_ptr cause_;
};

struct EpOutcome {
  Verdict verdict;
  CompletionOutcome answer;
  TokenUsage estimation_usage;
  TokenUsage answer_usage;
  std::optional<EstimatedBudget> estimate;
  /// Budget placed in the answer prompt; absent on the vanilla fallback.
  std::optional<Budget> budget_used;
  double alpha = 1.0;
  /// True when the estimate could not be parsed and vanilla CoT answered instead.
  bool fell_back = false;
  std::size_t backend_calls = 0;

  TokenUsage total_usage() const { return estimation_usage + answer_usage; }
};

EpOutcome run_ep(Backend& backend, const Question& question, double alpha = 1.0,
                 const EpOptions& options = {});

}  // namespace budgetcot
