#include "budgetcot/eval.hpp"

#include <charconv>
#include <mutex>

#include <fmt/format.h>

#include "budgetcot/estimate.hpp"

namespace budgetcot {

std::string Method::label() const {
  switch (kind) {
    case Kind::direct: return "direct";
    case Kind::vanilla_cot: return "vanilla";
    case Kind::estimate_then_prompt:
      return alpha == 1.0 ? std::string("ep") : fmt::format("ep(alpha={})", alpha);
    case Kind::fixed_budget: return fmt::format("budget:{}", budget ? budget->tokens() : 0);
  }
  return "vanilla";
}

Method Method::parse(std::string_view name, double alpha) {
  Method m;
  if (name == "direct") {
    m.kind = Kind::direct;
  } else if (name == "vanilla" || name == "vanilla_cot") {
    m.kind = Kind::vanilla_cot;
  } else if (name == "ep" || name == "tale_ep") {
    if (!(alpha > 0)) throw DomainError("--alpha must be positive");
    m.kind = Kind::estimate_then_prompt;
    m.alpha = alpha;
  } else if (name.rfind("budget:", 0) == 0) {
    const auto digits = name.substr(7);
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc() || ptr != digits.data() + digits.size())
      throw DomainError(fmt::format("bad fixed budget in method '{}'", name));
    m.kind = Kind::fixed_budget;
    m.budget = Budget(value);
  } else {
    throw DomainError(
        fmt::format("unknown method '{}' (expected direct|vanilla|ep|budget:N)", name));
  }
  return m;
}

void to_json(json& j, const SampleRecord& r) {
  j = json{{"question_id", r.question_id},
           {"method", r.method},
           {"status", r.failed ? "failed" : "ok"},
           {"correct", r.verdict.correct},
           {"extraction_rule", r.verdict.extraction_rule},
           {"answer_usage", r.answer_usage},
           {"total_usage", r.total_usage},
           {"expense", r.expense},
           {"fell_back", r.fell_back},
           {"response_fingerprint", r.response_fingerprint}};
  j["extracted"] = r.verdict.extracted ? json(*r.verdict.extracted) : json(nullptr);
  j["estimate"] = r.estimate ? json(*r.estimate) : json(nullptr);
  j["budget"] = r.budget ? json(*r.budget) : json(nullptr);
  if (r.failed) j["error"] = r.error;
}

void from_json(const json& j, SampleRecord& r) {
  r.question_id = j.at("question_id").get<std::string>();
  r.method = j.at("method").get<std::string>();
  r.failed = j.at("status").get<std::string>() == "failed";
  r.error = j.value("error", std::string());
  r.verdict.correct = j.at("correct").get<bool>();
  r.verdict.extraction_rule = j.at("extraction_rule").get<std::string>();
  r.verdict.extracted = j.at("extracted").is_null()
                            ? std::nullopt
                            : std::optional(j.at("extracted").get<std::string>());
  r.answer_usage = j.at("answer_usage").get<TokenUsage>();
  r.total_usage = j.at("total_usage").get<TokenUsage>();
  r.expense = j.at("expense").get<double>();
  r.estimate = j.at("estimate").is_null() ? std::nullopt
                                          : std::optional(j.at("estimate").get<std::int64_t>());
  r.budget = j.at("budget").is_null() ? std::nullopt
                                      : std::optional(j.at("budget").get<std::int64_t>());
  r.fell_back = j.at("fell_back").get<bool>();
  r.response_fingerprint = j.at("response_fingerprint").get<std::string>();
}

EvalReport aggregate(std::span<const SampleRecord> records, TokenAccounting accounting) {
  EvalReport report;
  std::int64_t tokens = 0;
  double expense = 0.0;
  for (const auto& r : records) {
    if (r.failed) {
      ++report.failed_count;
      continue;
    }
    ++report.sample_count;
    if (r.verdict.correct) ++report.correct_count;
    tokens += accounting == TokenAccounting::answer_only ? r.answer_usage.output_tokens
                                                         : r.total_usage.output_tokens;
    expense += r.expense;
  }
  if (report.sample_count > 0) {
    const auto n = static_cast<double>(report.sample_count);
    report.accuracy = static_cast<double>(report.correct_count) / n;
    report.mean_output_tokens = static_cast<double>(tokens) / n;
    report.mean_expense = expense / n;
  }
  return report;
}

namespace {

SampleRecord run_sample(Backend& backend, const Question& question, const Method& method,
                        const PricingTable& pricing, const RunOptions& options) {
  SampleRecord record;
  record.question_id = question.id;
  record.method = method.label();

  auto single_call = [&](const PromptKind& kind) {
    const auto outcome =
        backend.complete(build_prompt(question, kind, options.templates), options.sampling);
    record.verdict = grade(outcome.text, question);
    record.answer_usage = outcome.usage;
    record.total_usage = outcome.usage;
    record.response_fingerprint = outcome.request_fingerprint;
  };

  try {
    switch (method.kind) {
      case Method::Kind::direct:
        single_call(prompt_kind::DirectAnswer{});
        break;
      case Method::Kind::vanilla_cot:
        single_call(prompt_kind::VanillaCot{});
        break;
      case Method::Kind::fixed_budget:
        single_call(prompt_kind::BudgetedCot{*method.budget});
        record.budget = method.budget->tokens();
        break;
      case Method::Kind::estimate_then_prompt: {
        const auto ep =
            run_ep(backend, question, method.alpha, EpOptions{options.sampling, options.templates});
        record.verdict = ep.verdict;
        record.answer_usage = ep.answer_usage;
        record.total_usage = ep.total_usage();
        record.response_fingerprint = ep.answer.request_fingerprint;
        if (ep.estimate) record.estimate = ep.estimate->value.tokens();
        if (ep.budget_used) record.budget = ep.budget_used->tokens();
        record.fell_back = ep.fell_back;
        break;
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    SampleRecord failed;
    failed.question_id = question.id;
    failed.method = record.method;
    failed.failed = true;
    failed.error = e.what();
    return failed;
  }
  record.expense = compute_expense(record.total_usage, pricing);
  return record;
}

}  // namespace

MethodRun run_method(Backend& backend, const Dataset& dataset, const Method& method,
                     const PricingBook& pricing, const RunOptions& options) {
  if (dataset.questions.empty()) throw DomainError("cannot evaluate an empty dataset");
  if (method.kind == Method::Kind::fixed_budget && !method.budget)
    throw DomainError("fixed_budget method without a budget");
  const auto& table = pricing.at(backend.model_id());

  MethodRun run;
  run.dataset = dataset.name;
  run.model_id = backend.model_id();
  run.method = method;
  run.accounting = options.accounting;

  std::vector<std::optional<SampleRecord>> slots(dataset.questions.size());
  std::mutex sink_mutex;
  options.scheduler.for_each(dataset.questions.size(), [&](std::size_t i) {
    auto record = run_sample(backend, dataset.questions[i], method, table, options);
    std::lock_guard lock(sink_mutex);
    if (options.on_record) options.on_record(record);
    slots[i] = std::move(record);
  });

  run.records.reserve(slots.size());
  for (auto& slot : slots) run.records.push_back(std::move(*slot));
  run.report = aggregate(run.records, options.accounting);
  return run;
}

}  // namespace budgetcot
