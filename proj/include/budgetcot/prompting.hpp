#pragma once

// Byte-exact construction of every prompt variant the harness sends.

#include <string>
#include <variant>

#include "budgetcot/core.hpp"

namespace budgetcot {

struct ChatPrompt {
  std::string system;
  std::string user;

  friend bool operator==(const ChatPrompt&, const ChatPrompt&) = default;
};

namespace prompt_kind {
struct DirectAnswer {};
struct VanillaCot {};
struct BudgetedCot {
  Budget budget;
};
struct BudgetEstimation {};
struct FormatInstruction {};
}  // namespace prompt_kind

using PromptKind =
    std::variant<prompt_kind::DirectAnswer, prompt_kind::VanillaCot, prompt_kind::BudgetedCot,
                 prompt_kind::BudgetEstimation, prompt_kind::FormatInstruction>;

inline constexpr std::string_view kVanillaCotInstruction = "Let's think step by step:";
inline constexpr std::string_view kBudgetedCotInstruction =
    "Let's think step by step and use less than {budget} tokens:";
inline constexpr std::string_view kEstimationTaskLine =
    "Task: Analyze the given question and estimate the minimum number of tokens required for "
    "reasoning.";
inline constexpr std::string_view kEstimationOutputContract =
    "Respond with a single integer only.";
inline constexpr std::string_view kDirectAnswerInstruction =
    "Answer the question directly without any reasoning process.";
inline constexpr std::string_view kFormatInstruction =
    "This is a multiple-choice question. Choose exactly one option and end your response with "
    "\"The answer is X\", where X is the letter of the chosen option.";

/// Instruction texts. Overridable from the harness config; `budgeted_cot`
/// must contain the `{budget}` placeholder exactly once.
struct PromptTemplates {
  std::string vanilla_cot{kVanillaCotInstruction};
  std::string budgeted_cot{kBudgetedCotInstruction};
  std::string estimation_task{kEstimationTaskLine};
  std::string estimation_contract{kEstimationOutputContract};
  std::string direct_answer{kDirectAnswerInstruction};
  std::string format_instruction{kFormatInstruction};

  /// Throws ConfigError if budgeted_cot lacks a single `{budget}` placeholder.
  void validate() const;
};

const PromptTemplates& default_templates();

/// Renders the budgeted instruction, e.g. "... use less than 50 tokens:".
std::string render_budget_instruction(Budget budget,
                                      const PromptTemplates& templates = default_templates());

ChatPrompt build_prompt(const Question& question, const PromptKind& kind,
                        const PromptTemplates& templates = default_templates());

ChatPrompt build_estimation_prompt(const Question& question,
                                   const PromptTemplates& templates = default_templates());

}  // namespace budgetcot
