#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "budgetcot/eval.hpp"

namespace budgetcot {

enum class ReportFormat { table_text, csv, json };

std::string_view to_string(ReportFormat format);
ReportFormat report_format_from_string(std::string_view name);

struct ReportContext {
  std::string config_hash;
};

/// Percentage of vanilla CoT output tokens saved: 100 * (1 - method / vanilla).
std::optional<double> token_reduction_percent(double method_tokens, double vanilla_tokens);

struct ReportRow {
  std::string dataset;
  std::string method;
  std::string model_id;
  EvalReport report;
  /// Relative to the vanilla run on the same dataset, when there is one.
  std::optional<double> token_reduction;
};

std::vector<ReportRow> report_rows(std::span<const MethodRun> runs);

/// One row per (dataset, method) with ACC, output tokens and expense columns.
/// Output is a pure function of the inputs. Throws DomainError on no runs.
std::string render_report(std::span<const MethodRun> runs, ReportFormat format,
                          const ReportContext& context = {});

/// Reads back the rows of a JSON report.
std::vector<ReportRow> parse_json_report(const std::string& document);

}  // namespace budgetcot
