#include "budgetcot/report.hpp"

#include <fmt/format.h>

namespace budgetcot {

std::string_view to_string(ReportFormat format) {
  switch (format) {
    case ReportFormat::table_text: return "text";
    case ReportFormat::csv: return "csv";
    case ReportFormat::json: return "json";
  }
  return "text";
}

ReportFormat report_format_from_string(std::string_view name) {
  if (name == "text" || name == "table_text" || name == "table") return ReportFormat::table_text;
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw DomainError(fmt::format("unknown report format '{}' (expected text|csv|json)", name));
}

std::optional<double> token_reduction_percent(double method_tokens, double vanilla_tokens) {
  if (!(vanilla_tokens > 0)) return std::nullopt;
  return 100.0 * (1.0 - method_tokens / vanilla_tokens);
}

std::vector<ReportRow> report_rows(std::span<const MethodRun> runs) {
  std::vector<ReportRow> rows;
  for (const auto& run : runs) {
    ReportRow row{run.dataset, run.method.label(), run.model_id, run.report, std::nullopt};
    if (run.method.kind != Method::Kind::vanilla_cot) {
      for (const auto& other : runs) {
        if (other.dataset == run.dataset && other.method.kind == Method::Kind::vanilla_cot) {
          row.token_reduction = token_reduction_percent(run.report.mean_output_tokens,
                                                        other.report.mean_output_tokens);
          break;
        }
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string or_dash(const std::optional<double>& v, const char* spec) {
  return v ? fmt::format(fmt::runtime(spec), *v) : std::string("-");
}

std::string render_text(const std::vector<ReportRow>& rows, const ReportContext& context) {
  std::string out = fmt::format("{:<16} {:<14} {:>6} {:>6} {:>8} {:>14} {:>10} {:>10}\n",
                                "Dataset", "Method", "N", "Failed", "ACC(%)", "Output Tokens",
                                "Expense", "Reduction");
  for (const auto& r : rows) {
    out += fmt::format("{:<16} {:<14} {:>6} {:>6} {:>8.2f} {:>14.2f} {:>10.2f} {:>10}\n",
                       r.dataset, r.method, r.report.sample_count, r.report.failed_count,
                       100.0 * r.report.accuracy, r.report.mean_output_tokens,
                       r.report.mean_expense, or_dash(r.token_reduction, "{:.2f}%"));
  }
  out += "Expense in 1e-5 USD per sample; reduction is output tokens saved vs vanilla CoT.\n";
  if (!rows.empty()) out += fmt::format("model: {}\n", rows.front().model_id);
  if (!context.config_hash.empty()) out += fmt::format("config: {}\n", context.config_hash);
  return out;
}

std::string render_csv(const std::vector<ReportRow>& rows, const ReportContext& context) {
  std::string out =
      "dataset,method,model_id,sample_count,failed_count,accuracy,mean_output_tokens,"
      "mean_expense,token_reduction_pct,config_hash\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{:.6f},{:.4f},{:.4f},{},{}\n", r.dataset, r.method,
                       r.model_id, r.report.sample_count, r.report.failed_count, r.report.accuracy,
                       r.report.mean_output_tokens, r.report.mean_expense,
                       r.token_reduction ? fmt::format("{:.4f}", *r.token_reduction) : "",
                       context.config_hash);
  }
  return out;
}

std::string render_json(const std::vector<ReportRow>& rows, const ReportContext& context) {
  json out_rows = json::array();
  for (const auto& r : rows) {
    json row = {{"dataset", r.dataset},
                {"method", r.method},
                {"model_id", r.model_id},
                {"sample_count", r.report.sample_count},
                {"correct_count", r.report.correct_count},
                {"failed_count", r.report.failed_count},
                {"accuracy", r.report.accuracy},
                {"mean_output_tokens", r.report.mean_output_tokens},
                {"mean_expense", r.report.mean_expense}};
    row["token_reduction_pct"] = r.token_reduction ? json(*r.token_reduction) : json(nullptr);
    out_rows.push_back(std::move(row));
  }
  const json doc = {{"config_hash", context.config_hash},
                    {"expense_unit", "1e-5 USD per sample"},
                    {"rows", std::move(out_rows)}};
  return doc.dump(2) + "\n";
}

}  // namespace

std::string render_report(std::span<const MethodRun> runs, ReportFormat format,
                          const ReportContext& context) {
  if (runs.empty()) throw DomainError("no runs to report");
  const auto rows = report_rows(runs);
  switch (format) {
    case ReportFormat::table_text: return render_text(rows, context);
    case ReportFormat::csv: return render_csv(rows, context);
    case ReportFormat::json: return render_json(rows, context);
  }
  return {};
}

std::vector<ReportRow> parse_json_report(const std::string& document) {
  const auto doc = json::parse(document);
  std::vector<ReportRow> rows;
  for (const auto& j : doc.at("rows")) {
    ReportRow row;
    row.dataset = j.at("dataset").get<std::string>();
    row.method = j.at("method").get<std::string>();
    row.model_id = j.at("model_id").get<std::string>();
    row.report.sample_count = j.at("sample_count").get<std::size_t>();
    row.report.correct_count = j.at("correct_count").get<std::size_t>();
    row.report.failed_count = j.at("failed_count").get<std::size_t>();
    row.report.accuracy = j.at("accuracy").get<double>();
    row.report.mean_output_tokens = j.at("mean_output_tokens").get<double>();
    row.report.mean_expense = j.at("mean_expense").get<double>();
    if (!j.at("token_reduction_pct").is_null())
      row.token_reduction = j.at("token_reduction_pct").get<double>();
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace budgetcot
