#include "budgetcot/prompting.hpp"

#include <initializer_list>

namespace budgetcot {

namespace {

constexpr std::string_view kPlaceholder = "{budget}";

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string join_lines(std::initializer_list<std::string_view> parts) {
  std::string out;
  for (auto part : parts) {
    if (part.empty()) continue;
    if (!out.empty()) out += '\n';
    out += part;
  }
  return out;
}

}  // namespace

void PromptTemplates::validate() const {
  const auto first = budgeted_cot.find(kPlaceholder);
  if (first == std::string::npos || budgeted_cot.find(kPlaceholder, first + 1) != std::string::npos)
    throw ConfigError("budgeted_cot template must contain exactly one {budget} placeholder");
}

const PromptTemplates& default_templates() {
  static const PromptTemplates templates;
  return templates;
}

std::string render_budget_instruction(Budget budget, const PromptTemplates& templates) {
  std::string out = templates.budgeted_cot;
  const auto pos = out.find(kPlaceholder);
  if (pos == std::string::npos) throw ConfigError("budgeted_cot template lacks {budget}");
  out.replace(pos, kPlaceholder.size(), std::to_string(budget.tokens()));
  return out;
}

ChatPrompt build_prompt(const Question& question, const PromptKind& kind,
                        const PromptTemplates& templates) {
  const bool choice = question.answer_kind == AnswerKind::multiple_choice;
  const std::string_view format = choice ? std::string_view(templates.format_instruction) : "";

  return std::visit(
      Overloaded{
          [&](const prompt_kind::DirectAnswer&) {
            return ChatPrompt{"", join_lines({question.text, templates.direct_answer, format})};
          },
          [&](const prompt_kind::VanillaCot&) {
            return ChatPrompt{"", join_lines({question.text, format, templates.vanilla_cot})};
          },
          [&](const prompt_kind::BudgetedCot& k) {
            const auto instruction = render_budget_instruction(k.budget, templates);
            return ChatPrompt{"", join_lines({question.text, format, instruction})};
          },
          [&](const prompt_kind::BudgetEstimation&) {
            return build_estimation_prompt(question, templates);
          },
          [&](const prompt_kind::FormatInstruction&) {
            return ChatPrompt{"", join_lines({question.text, templates.format_instruction})};
          },
      },
      kind);
}

ChatPrompt build_estimation_prompt(const Question& question, const PromptTemplates& templates) {
  std::string user = templates.estimation_task;
  user += "\nQuestion: ";
  user += question.text;
  user += '\n';
  user += templates.estimation_contract;
  return ChatPrompt{"", std::move(user)};
}

}  // namespace budgetcot
