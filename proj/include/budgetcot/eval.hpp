#pragma once

// Runs one prompting method over a dataset and aggregates accuracy, output
// tokens and expense.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "budgetcot/backend.hpp"
#include "budgetcot/dataset.hpp"
#include "budgetcot/grading.hpp"
#include "budgetcot/prompting.hpp"
#include "budgetcot/scheduler.hpp"
#include "budgetcot/serialize.hpp"

namespace budgetcot {

struct Method {
  enum class Kind { direct, vanilla_cot, estimate_then_prompt, fixed_budget };

  Kind kind = Kind::vanilla_cot;
  /// Scale applied to estimated budgets (estimate_then_prompt only).
  double alpha = 1.0;
  /// Constant budget (fixed_budget only).
  std::optional<Budget> budget;

  /// "direct", "vanilla", "ep", "ep(alpha=2)", "budget:50".
  std::string label() const;

  /// Accepts direct | vanilla | ep | budget:N (plus vanilla_cot, tale_ep aliases).
  static Method parse(std::string_view name, double alpha = 1.0);
};

/// Which calls count toward the output-token column.
enum class TokenAccounting {
  /// Only the call that produced the answer.
  answer_only,
  /// Every call made for the sample (estimation included).
  all_calls,
};

struct SampleRecord {
  std::string question_id;
  std::string method;
  bool failed = false;
  std::string error;
  Verdict verdict;
  /// Usage of the answer-producing call.
  TokenUsage answer_usage;
  /// Usage summed over every call made for this sample.
  TokenUsage total_usage;
  /// 1e-5 USD over every call made for this sample.
  double expense = 0.0;
  std::optional<std::int64_t> estimate;
  std::optional<std::int64_t> budget;
  bool fell_back = false;
  std::string response_fingerprint;
};

void to_json(json& j, const SampleRecord& r);
void from_json(const json& j, SampleRecord& r);

struct EvalReport {
  double accuracy = 0.0;
  double mean_output_tokens = 0.0;
  double mean_expense = 0.0;
  /// Samples that completed; failed samples are excluded from every mean.
  std::size_t sample_count = 0;
  std::size_t correct_count = 0;
  std::size_t failed_count = 0;
};

EvalReport aggregate(std::span<const SampleRecord> records,
                     TokenAccounting accounting = TokenAccounting::answer_only);

struct MethodRun {
  std::string dataset;
  std::string model_id;
  Method method;
  TokenAccounting accounting = TokenAccounting::answer_only;
  /// In dataset order.
  std::vector<SampleRecord> records;
  EvalReport report;
};

struct RunOptions {
  SamplingParams sampling;
  PromptTemplates templates;
  TokenAccounting accounting = TokenAccounting::answer_only;
  Scheduler scheduler{1};
  /// Called once per finished sample, serialized, in completion order.
  std::function<void(const SampleRecord&)> on_record;
};

/// Throws DomainError on an empty dataset and ConfigError when `pricing` has
/// no entry for the backend's model. Per-sample backend failures become
/// failed records.
MethodRun run_method(Backend& backend, const Dataset& dataset, const Method& method,
                     const PricingBook& pricing, const RunOptions& options = {});

}  // namespace budgetcot
