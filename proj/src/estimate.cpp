#include "budgetcot/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

namespace budgetcot {

EstimatedBudget parse_budget_estimate(const std::string& response) {
  static const std::regex integer(R"(\d{1,3}(?:,\d{3})+(?!\d)|\d+)");
  std::smatch m;
  if (!std::regex_search(response, m, integer)) throw EstimationParseError(response);

  std::int64_t value = 0;
  for (char ch : m.str(0)) {
    if (ch == ',') continue;
    value = std::min(kMaxEstimatedBudget, value * 10 + (ch - '0'));
  }
  return EstimatedBudget{Budget(std::max<std::int64_t>(1, value)), response, "first_integer"};
}

EstimatedBudget estimate_budget(Backend& backend, const Question& question,
                                const EpOptions& options) {
  const auto outcome =
      backend.complete(build_estimation_prompt(question, options.templates), options.sampling);
  return parse_budget_estimate(outcome.text);
}

Budget scale_budget(const EstimatedBudget& estimate, double alpha) {
  if (!(alpha > 0)) throw DomainError("budget scale factor must be positive");
  const double scaled = std::round(alpha * static_cast<double>(estimate.value.tokens()));
  const double clamped = std::clamp(scaled, 1.0, static_cast<double>(kMaxEstimatedBudget));
  return Budget(static_cast<std::int64_t>(clamped));
}

EpOutcome run_ep(Backend& backend, const Question& question, double alpha,
                 const EpOptions& options) {
  if (!(alpha > 0)) throw DomainError("budget scale factor must be positive");
  EpOutcome out;
  out.alpha = alpha;

  auto call = [&](const char* stage, const ChatPrompt& prompt) {
    try {
      auto outcome = backend.complete(prompt, options.sampling);
      ++out.backend_calls;
      return outcome;
    } catch (const Error& e) {
      throw StageError(stage, e.what(), std::current_exception());
    }
  };

  const auto estimation = call("estimation", build_estimation_prompt(question, options.templates));
  out.estimation_usage = estimation.usage;

  ChatPrompt answer_prompt;
  try {
    out.estimate = parse_budget_estimate(estimation.text);
    out.budget_used = scale_budget(*out.estimate, alpha);
    answer_prompt =
        build_prompt(question, prompt_kind::BudgetedCot{*out.budget_used}, options.templates);
  } catch (const EstimationParseError&) {
    out.fell_back = true;
    answer_prompt = build_prompt(question, prompt_kind::VanillaCot{}, options.templates);
  }

  out.answer = call("answer", answer_prompt);
  out.answer_usage = out.answer.usage;
  out.verdict = grade(out.answer.text, question);
  return out;
}

}  // namespace budgetcot
