#pragma once

// Optimal token-budget search: a strict halving sequence below the vanilla
// CoT cost, accepting each candidate only while the answer stays correct and
// the observed output cost keeps strictly decreasing.

#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "budgetcot/backend.hpp"
#include "budgetcot/prompting.hpp"
#include "budgetcot/serialize.hpp"

namespace budgetcot {

struct TracePoint {
  Budget budget;
  /// Observed output tokens under `budget`; equals response.usage.output_tokens.
  std::int64_t observed_cost = 0;
  bool correct = false;
  CompletionOutcome response;
};

/// Budgeted queries of one search, budgets strictly decreasing.
struct ElasticityTrace {
  std::vector<TracePoint> points;
};

enum class SearchStatus { found, vanilla_incorrect, no_feasible_budget };

std::string_view to_string(SearchStatus status);
SearchStatus search_status_from_string(std::string_view name);

/// Where the first candidate's reference cost comes from.
enum class BaselineMode {
  /// A budgeted query at budget = vanilla cost.
  probe,
  /// The unbudgeted vanilla response itself.
  vanilla,
};

std::string_view to_string(BaselineMode mode);
BaselineMode baseline_mode_from_string(std::string_view name);

struct SearchResult {
  std::string question_id;
  SearchStatus status = SearchStatus::no_feasible_budget;
  std::optional<Budget> optimal_budget;
  /// Response produced under the optimal budget (the vanilla response when no
  /// halved candidate was accepted).
  std::optional<CompletionOutcome> target;
  ElasticityTrace trace;
  /// Vanilla CoT output tokens; the search space is [1, upper_bound].
  std::int64_t upper_bound = 0;
  CompletionOutcome vanilla;
  bool vanilla_correct = false;
  BaselineMode baseline = BaselineMode::probe;
  /// Completions issued, vanilla call included.
  std::size_t completions = 0;
};

struct SearchOptions {
  BaselineMode baseline = BaselineMode::probe;
  SamplingParams sampling;
  PromptTemplates templates;
};

/// Thrown when the backend fails mid-search; carries what was gathered so far.
class SearchAborted : public Error {
 public:
  SearchAborted(const std::string& what, SearchResult partial, std::exception_ptr cause)
      : Error(what), partial_(std::move(partial)), cause_(std::move(cause)) {}
  const SearchResult& partial() const noexcept { return partial_; }
  /// The backend exception that stopped the search.
  std::exception_ptr cause() const noexcept { return cause_; }

 private:
  SearchResult partial_;
  std::exception_ptr cause_;
};

/// floor(upper/2), floor(upper/4), ... down to 1. Empty when upper_bound < 2.
std::vector<Budget> halving_candidates(std::int64_t upper_bound);

SearchResult search_optimal_budget(Backend& backend, const Question& question,
                                   const SearchOptions& options = {});

// ---- serialization --------------------------------------------------------

/// JSONL record: status, budgets, trace of (budget, output_tokens, correct,
/// response_fingerprint). Loading restores responses as references only.
void to_json(json& j, const SearchResult& result);
void from_json(const json& j, SearchResult& result);

/// Header of the plot-ready elasticity export.
inline constexpr std::string_view kElasticityCsvHeader =
    "question_id,iteration,budget,output_tokens,correct";

/// CSV rows (no header) for one search, one per trace point.
std::string elasticity_csv_rows(const SearchResult& result);

}  // namespace budgetcot
