#include "budgetcot/search.hpp"

#include <fmt/format.h>

#include "budgetcot/grading.hpp"

namespace budgetcot {

std::string_view to_string(SearchStatus status) {
  switch (status) {
    case SearchStatus::found: return "found";
    case SearchStatus::vanilla_incorrect: return "vanilla_incorrect";
    case SearchStatus::no_feasible_budget: return "no_feasible_budget";
  }
  return "no_feasible_budget";
}

SearchStatus search_status_from_string(std::string_view name) {
  if (name == "found") return SearchStatus::found;
  if (name == "vanilla_incorrect") return SearchStatus::vanilla_incorrect;
  if (name == "no_feasible_budget") return SearchStatus::no_feasible_budget;
  throw DomainError(fmt::format("unknown search status '{}'", name));
}

std::string_view to_string(BaselineMode mode) {
  return mode == BaselineMode::probe ? "probe" : "vanilla";
}

BaselineMode baseline_mode_from_string(std::string_view name) {
  if (name == "probe") return BaselineMode::probe;
  if (name == "vanilla") return BaselineMode::vanilla;
  throw DomainError(fmt::format("unknown baseline mode '{}' (expected probe|vanilla)", name));
}

std::vector<Budget> halving_candidates(std::int64_t upper_bound) {
  std::vector<Budget> out;
  for (auto b = upper_bound / 2; b > 0; b /= 2) out.emplace_back(b);
  return out;
}

SearchResult search_optimal_budget(Backend& backend, const Question& question,
                                   const SearchOptions& options) {
  SearchResult result;
  result.question_id = question.id;
  result.baseline = options.baseline;

  auto query = [&](const PromptKind& kind) {
    try {
      auto outcome = backend.complete(build_prompt(question, kind, options.templates),
                                      options.sampling);
      ++result.completions;
      return outcome;
    } catch (const Error& e) {
      throw SearchAborted(fmt::format("search for '{}' aborted: {}", question.id, e.what()),
                          result, std::current_exception());
    }
  };
  auto probe = [&](Budget budget) -> const TracePoint& {
    auto outcome = query(prompt_kind::BudgetedCot{budget});
    const bool correct = grade(outcome.text, question).correct;
    const auto cost = outcome.usage.output_tokens;
    result.trace.points.push_back(TracePoint{budget, cost, correct, std::move(outcome)});
    return result.trace.points.back();
  };

  result.vanilla = query(prompt_kind::VanillaCot{});
  result.vanilla_correct = grade(result.vanilla.text, question).correct;
  result.upper_bound = result.vanilla.usage.output_tokens;

  if (!result.vanilla_correct) {
    result.status = SearchStatus::vanilla_incorrect;
    return result;
  }
  if (result.upper_bound < 1) {
    result.status = SearchStatus::no_feasible_budget;
    return result;
  }

  // The upper bound is feasible by precondition (vanilla answer is correct).
  result.status = SearchStatus::found;
  result.optimal_budget = Budget(result.upper_bound);
  result.target = result.vanilla;

  std::int64_t previous_cost = result.upper_bound;
  if (options.baseline == BaselineMode::probe)
    previous_cost = probe(Budget(result.upper_bound)).observed_cost;

  for (const auto candidate : halving_candidates(result.upper_bound)) {
    const auto& point = probe(candidate);
    if (!(point.correct && point.observed_cost < previous_cost)) break;
    previous_cost = point.observed_cost;
    result.optimal_budget = candidate;
    result.target = point.response;
  }
  return result;
}

// ---- serialization --------------------------------------------------------

void to_json(json& j, const SearchResult& r) {
  json trace = json::array();
  for (const auto& p : r.trace.points) {
    trace.push_back({{"budget", p.budget.tokens()},
                     {"output_tokens", p.observed_cost},
                     {"correct", p.correct},
                     {"response_fingerprint", p.response.request_fingerprint}});
  }
  j = json{{"question_id", r.question_id},
           {"status", to_string(r.status)},
           {"upper_bound", r.upper_bound},
           {"baseline", to_string(r.baseline)},
           {"completions", r.completions},
           {"vanilla",
            {{"output_tokens", r.vanilla.usage.output_tokens},
             {"correct", r.vanilla_correct},
             {"response_fingerprint", r.vanilla.request_fingerprint}}},
           {"trace", std::move(trace)}};
  j["optimal_budget"] = r.optimal_budget ? json(r.optimal_budget->tokens()) : json(nullptr);
  if (r.target) {
    j["target"] = {{"text", r.target->text},
                   {"output_tokens", r.target->usage.output_tokens},
                   {"response_fingerprint", r.target->request_fingerprint}};
  } else {
    j["target"] = nullptr;
  }
}

void from_json(const json& j, SearchResult& r) {
  r.question_id = j.at("question_id").get<std::string>();
  r.status = search_status_from_string(j.at("status").get<std::string>());
  r.upper_bound = j.at("upper_bound").get<std::int64_t>();
  r.baseline = baseline_mode_from_string(j.value("baseline", std::string("probe")));
  r.completions = j.value("completions", std::size_t{0});

  const auto& vanilla = j.at("vanilla");
  r.vanilla = {};
  r.vanilla.usage.output_tokens = vanilla.at("output_tokens").get<std::int64_t>();
  r.vanilla.request_fingerprint = vanilla.value("response_fingerprint", std::string());
  r.vanilla_correct = vanilla.at("correct").get<bool>();

  r.trace.points.clear();
  for (const auto& p : j.at("trace")) {
    CompletionOutcome ref;
    ref.usage.output_tokens = p.at("output_tokens").get<std::int64_t>();
    ref.request_fingerprint = p.value("response_fingerprint", std::string());
    r.trace.points.push_back(TracePoint{Budget(p.at("budget").get<std::int64_t>()),
                                        ref.usage.output_tokens, p.at("correct").get<bool>(),
                                        std::move(ref)});
  }

  const auto& optimal = j.at("optimal_budget");
  r.optimal_budget = optimal.is_null() ? std::nullopt
                                       : std::optional(Budget(optimal.get<std::int64_t>()));
  r.target.reset();
  if (const auto& t = j.at("target"); !t.is_null()) {
    CompletionOutcome target;
    target.text = t.at("text").get<std::string>();
    target.usage.output_tokens = t.at("output_tokens").get<std::int64_t>();
    target.request_fingerprint = t.value("response_fingerprint", std::string());
    r.target = std::move(target);
  }
}

std::string elasticity_csv_rows(const SearchResult& result) {
  std::string out;
  std::size_t iteration = 0;
  for (const auto& p : result.trace.points) {
    out += fmt::format("{},{},{},{},{}\n", result.question_id, iteration++, p.budget.tokens(),
                       p.observed_cost, p.correct ? "true" : "false");
  }
  return out;
}

}  // namespace budgetcot
