#include "budgetcot/audit.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "budgetcot/grading.hpp"

namespace budgetcot {

std::vector<double> default_audit_multipliers() { return {0.25, 0.5, 1.0, 2.0, 4.0}; }

Budget scaled_budget(Budget optimal, double multiplier) {
  const double raw = std::floor(multiplier * static_cast<double>(optimal.tokens()));
  return Budget(std::max<std::int64_t>(1, static_cast<std::int64_t>(raw)));
}

bool is_monotonic(std::span<const AuditPoint> points) {
  return std::all_of(points.begin(), points.end(), [](const AuditPoint& p) {
    return p.multiplier < 1.0 ? !p.correct : p.correct;
  });
}

AuditResult monotonicity_audit(Backend& backend, const Question& question, Budget optimal,
                               std::span<const double> multipliers, const AuditOptions& options) {
  if (multipliers.empty()) throw DomainError("audit needs at least one multiplier");
  for (double m : multipliers)
    if (!(m > 0)) throw DomainError("audit multipliers must be positive");

  AuditResult result;
  result.question_id = question.id;
  result.optimal_budget = optimal;
  for (double m : multipliers) {
    const auto budget = scaled_budget(optimal, m);
    const auto outcome = backend.complete(
        build_prompt(question, prompt_kind::BudgetedCot{budget}, options.templates),
        options.sampling);
    result.points.push_back(AuditPoint{m, budget, grade(outcome.text, question).correct,
                                       outcome.usage.output_tokens});
  }
  result.monotonic = is_monotonic(result.points);
  return result;
}

CohortAudit summarize_audit(std::vector<AuditResult> results, std::vector<SkippedAudit> skipped) {
  CohortAudit cohort;
  cohort.results = std::move(results);
  cohort.skipped = std::move(skipped);

  struct Acc {
    std::size_t n = 0, correct = 0;
    std::int64_t tokens = 0;
  };
  std::map<double, Acc> by_multiplier;
  for (const auto& r : cohort.results) {
    if (r.monotonic) ++cohort.monotonic_count;
    for (const auto& p : r.points) {
      auto& acc = by_multiplier[p.multiplier];
      ++acc.n;
      acc.correct += p.correct ? 1 : 0;
      acc.tokens += p.output_tokens;
    }
  }
  if (!cohort.results.empty())
    cohort.monotonic_fraction =
        static_cast<double>(cohort.monotonic_count) / static_cast<double>(cohort.results.size());
  for (const auto& [m, acc] : by_multiplier) {
    cohort.per_multiplier.push_back(
        {m, acc.n, static_cast<double>(acc.correct) / static_cast<double>(acc.n),
         static_cast<double>(acc.tokens) / static_cast<double>(acc.n)});
  }
  return cohort;
}

void to_json(json& j, const AuditResult& result) {
  json points = json::array();
  for (const auto& p : result.points) {
    points.push_back({{"multiplier", p.multiplier},
                      {"budget", p.budget.tokens()},
                      {"correct", p.correct},
                      {"output_tokens", p.output_tokens}});
  }
  j = json{{"question_id", result.question_id},
           {"optimal_budget", result.optimal_budget.tokens()},
           {"monotonic", result.monotonic},
           {"points", std::move(points)}};
}

void to_json(json& j, const CohortAudit& cohort) {
  json skipped = json::array();
  for (const auto& s : cohort.skipped)
    skipped.push_back({{"question_id", s.question_id}, {"reason", s.reason}});
  json rows = json::array();
  for (const auto& m : cohort.per_multiplier) {
    rows.push_back({{"multiplier", m.multiplier},
                    {"samples", m.samples},
                    {"accuracy", m.accuracy},
                    {"mean_output_tokens", m.mean_output_tokens}});
  }
  j = json{{"audited", cohort.results.size()},
           {"monotonic", cohort.monotonic_count},
           {"monotonic_fraction", cohort.monotonic_fraction},
           {"per_multiplier", std::move(rows)},
           {"skipped", std::move(skipped)}};
}

}  // namespace budgetcot
