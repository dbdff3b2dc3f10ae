#pragma once

// Monotonicity audit: re-query a question at scaled multiples of its optimal
// budget and check that every answer below it is wrong and every answer at or
// above it is right.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "budgetcot/backend.hpp"
#include "budgetcot/prompting.hpp"
#include "budgetcot/serialize.hpp"

namespace budgetcot {

/// 2^-2, 2^-1, 1, 2, 4.
std::vector<double> default_audit_multipliers();

/// floor(multiplier * optimal), clamped to >= 1.
Budget scaled_budget(Budget optimal, double multiplier);

struct AuditPoint {
  double multiplier = 1.0;
  Budget budget;
  bool correct = false;
  std::int64_t output_tokens = 0;
};

struct AuditResult {
  std::string question_id;
  Budget optimal_budget{1};
  std::vector<AuditPoint> points;
  bool monotonic = false;
};

/// Points with multiplier < 1 must be incorrect, the rest correct.
bool is_monotonic(std::span<const AuditPoint> points);

struct AuditOptions {
  SamplingParams sampling;
  PromptTemplates templates;
};

/// Throws DomainError on an empty or non-positive multiplier list; backend
/// errors propagate.
AuditResult monotonicity_audit(Backend& backend, const Question& question, Budget optimal,
                               std::span<const double> multipliers,
                               const AuditOptions& options = {});

struct MultiplierSummary {
  double multiplier = 1.0;
  std::size_t samples = 0;
  double accuracy = 0.0;
  double mean_output_tokens = 0.0;
};

struct SkippedAudit {
  std::string question_id;
  std::string reason;
};

struct CohortAudit {
  std::vector<AuditResult> results;
  std::vector<SkippedAudit> skipped;
  std::size_t monotonic_count = 0;
  /// monotonic_count / results.size(); 0 when nothing was audited.
  double monotonic_fraction = 0.0;
  std::vector<MultiplierSummary> per_multiplier;
};

CohortAudit summarize_audit(std::vector<AuditResult> results, std::vector<SkippedAudit> skipped);

void to_json(json& j, const AuditResult& result);
void to_json(json& j, const CohortAudit& cohort);

}  // namespace budgetcot
