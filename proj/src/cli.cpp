#include "budgetcot/cli.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "budgetcot/audit.hpp"
#include "budgetcot/dataset.hpp"
#include "budgetcot/elasticity.hpp"
#include "budgetcot/eval.hpp"
#include "budgetcot/ptdata.hpp"
#include "budgetcot/report.hpp"
#include "budgetcot/scripted_backend.hpp"
#include "budgetcot/search.hpp"

namespace budgetcot {

namespace fs = std::filesystem;

// ---- harness --------------------------------------------------------------

namespace {

std::unique_ptr<Backend> make_upstream(const HarnessConfig& config, RateLimiter& limiter) {
  if (config.backend.kind == BackendSection::Kind::scripted) {
    auto script = load_scripted_script(config.backend.script);
    if (!config.backend.model_id.empty()) script.model_id = config.backend.model_id;
    return std::make_unique<ScriptedBackend>(std::move(script), config.templates);
  }
  LiveBackendConfig live;
  live.endpoint = config.backend.endpoint;
  live.api_key = resolve_api_key(config.backend);
  live.model_id = config.backend.model_id;
  live.retry = config.retry;
  live.jitter_seed = static_cast<std::uint64_t>(config.sampling.seed);
  return std::make_unique<OpenAiChatBackend>(std::move(live), limiter);
}

}  // namespace

Harness::Harness(HarnessConfig config, fs::path out_dir)
    : config_(std::move(config)), out_dir_(std::move(out_dir)) {
  limiter_ = std::make_unique<RateLimiter>(config_.rate_limit.requests_per_second,
                                           config_.rate_limit.burst);
  upstream_ = make_upstream(config_, *limiter_);
  cache_ = std::make_unique<ResponseCache>(config_.cache_file.value_or(out_dir_ / "cache.jsonl"));
  caching_ = std::make_unique<CachingBackend>(*upstream_, *cache_);
}

Harness::Harness(HarnessConfig config, fs::path out_dir, std::unique_ptr<Backend> upstream)
    : config_(std::move(config)), out_dir_(std::move(out_dir)), upstream_(std::move(upstream)) {
  limiter_ = std::make_unique<RateLimiter>(config_.rate_limit.requests_per_second,
                                           config_.rate_limit.burst);
  cache_ = std::make_unique<ResponseCache>(config_.cache_file.value_or(out_dir_ / "cache.jsonl"));
  caching_ = std::make_unique<CachingBackend>(*upstream_, *cache_);
}

fs::path resolve_out_dir(const CliOptions& options, const HarnessConfig& config) {
  return options.out_dir.value_or(config.output_dir);
}

// ---- shared helpers -------------------------------------------------------

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  out << content;
  out.close();
  if (!out) throw Error(fmt::format("failed writing {}", path.string()));
}

std::string file_safe(std::string label) {
  for (auto& ch : label)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '.') ch = '_';
  return label;
}

SamplingParams effective_sampling(const CliOptions& options, const HarnessConfig& config) {
  auto params = config.sampling;
  if (options.seed) params.seed = static_cast<std::int64_t>(*options.seed);
  return params;
}

unsigned effective_concurrency(const CliOptions& options, const HarnessConfig& config) {
  const auto c = options.concurrency.value_or(config.concurrency);
  if (c < 1) throw ConfigError("--concurrency must be >= 1");
  return c;
}

DatasetFormat detect_format(const fs::path& path) {
  if (path.extension() == ".jsonl") return DatasetFormat::gsm8k_jsonl;
  std::ifstream in(path);
  if (in) {
    try {
      const auto doc = json::parse(in);
      if (doc.is_object() && doc.contains("questions")) return DatasetFormat::scripted_json;
    } catch (const json::exception&) {
    }
  }
  return DatasetFormat::mathbench_json;
}

Dataset load_cli_dataset(const CliOptions& options, const HarnessConfig& config) {
  fs::path path = options.dataset;
  if (path.empty()) {
    if (config.backend.kind != BackendSection::Kind::scripted)
      throw ConfigError("--dataset is required with a live backend");
    path = config.backend.script;
  }
  const auto format = options.dataset_format == "auto"
                          ? detect_format(path)
                          : dataset_format_from_string(options.dataset_format);
  auto dataset = load_dataset(path, format);
  if (options.sample_n) {
    const auto seed = options.seed.value_or(static_cast<std::uint64_t>(config.sampling.seed));
    dataset = sample_dataset(dataset, *options.sample_n, seed);
  }
  return dataset;
}

json run_manifest(const std::string& verb, const CliOptions& options, const Harness& harness,
                  const Dataset& dataset) {
  const auto& config = harness.config();
  json manifest = {{"verb", verb},
                   {"config_hash", config.hash},
                   {"model_id", config.backend.model_id},
                   {"seed", effective_sampling(options, config).seed},
                   {"temperature", config.sampling.temperature},
                   {"dataset", dataset.name},
                   {"questions", dataset.questions.size()}};
  if (dataset.sampling) {
    manifest["sampling"] = {{"seed", dataset.sampling->seed},
                            {"sample_size", dataset.sampling->sample_size},
                            {"source_size", dataset.sampling->source_size}};
  }
  return manifest;
}

std::optional<std::size_t> parse_k(const std::string& k) {
  if (k == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const auto value = std::stoll(k, &used);
    if (used == k.size() && value >= 1) return static_cast<std::size_t>(value);
  } catch (const std::exception&) {
  }
  throw ConfigError(fmt::format("--k must be 'auto' or a positive integer, got '{}'", k));
}

std::vector<double> parse_multipliers(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    try {
      std::size_t used = 0;
      const double value = std::stod(item, &used);
      if (used != item.size() || !(value > 0)) throw std::invalid_argument(item);
      out.push_back(value);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("bad multiplier '{}'", item));
    }
  }
  if (out.empty()) throw ConfigError("--multipliers is empty");
  return out;
}

struct LoadedSearch {
  std::vector<SearchResult> results;
  std::size_t error_rows = 0;
};

LoadedSearch load_search_output(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("search output {} not found", path.string()));
  LoadedSearch loaded;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      if (j.value("status", std::string()) == "error") {
        ++loaded.error_rows;
        continue;
      }
      loaded.results.push_back(j.get<SearchResult>());
    } catch (const json::exception& e) {
      throw DatasetError(fmt::format("{}: {}", path.string(), e.what()), number);
    }
  }
  return loaded;
}

fs::path search_output_path(const CliOptions& options, const fs::path& out_dir) {
  return options.search_output.value_or(out_dir / "search_results.jsonl");
}

SearchOptions search_options(const CliOptions& options, const HarnessConfig& config) {
  return SearchOptions{baseline_mode_from_string(options.baseline),
                       effective_sampling(options, config), config.templates};
}

}  // namespace

// ---- verbs ----------------------------------------------------------------

int cmd_eval(const CliOptions& options, Harness& harness, std::ostream& out) {
  const auto& config = harness.config();
  const auto dataset = load_cli_dataset(options, config);
  const auto format = options.format.empty() ? ReportFormat::table_text
                                             : report_format_from_string(options.format);

  std::vector<Method> methods;
  for (const auto& name : split_list(options.methods)) methods.push_back(Method::parse(name, options.alpha));
  if (methods.empty()) throw ConfigError("--methods is empty");

  RunOptions run_options;
  run_options.sampling = effective_sampling(options, config);
  run_options.templates = config.templates;
  run_options.scheduler = Scheduler(effective_concurrency(options, config));
  if (options.token_accounting == "all") {
    run_options.accounting = TokenAccounting::all_calls;
  } else if (options.token_accounting != "answer") {
    throw ConfigError("--token-accounting must be answer|all");
  }

  std::vector<MethodRun> runs;
  bool partial = false;
  for (const auto& method : methods) {
    const auto records_path =
        harness.out_dir() / "eval" / fmt::format("{}.{}.jsonl", file_safe(dataset.name),
                                                  file_safe(method.label()));
    auto journal_path = records_path;
    journal_path += ".partial";
    fs::create_directories(records_path.parent_path());
    {
      std::ofstream journal(journal_path, std::ios::app);
      run_options.on_record = [&journal](const SampleRecord& r) {
        journal << json(r).dump() << '\n';
        journal.flush();
      };
      runs.push_back(
          run_method(harness.backend(), dataset, method, config.pricing, run_options));
    }

    std::string lines;
    for (const auto& r : runs.back().records) lines += json(r).dump() + "\n";
    write_file(records_path, lines);
    fs::remove(journal_path);
    if (runs.back().report.failed_count > 0) partial = true;
  }

  const ReportContext context{config.hash};
  const auto report = render_report(runs, format, context);
  const char* ext = format == ReportFormat::csv ? "csv" : format == ReportFormat::json ? "json" : "txt";
  write_file(harness.out_dir() / fmt::format("report.{}", ext), report);
  out << render_report(runs, ReportFormat::table_text, context);

  auto manifest = run_manifest("eval", options, harness, dataset);
  json method_labels = json::array();
  for (const auto& m : methods) method_labels.push_back(m.label());
  manifest["methods"] = std::move(method_labels);
  manifest["alpha"] = options.alpha;
  manifest["token_accounting"] = options.token_accounting;
  write_file(harness.out_dir() / "eval_manifest.json", manifest.dump(2) + "\n");
  return partial ? kExitPartial : kExitOk;
}

int cmd_search(const CliOptions& options, Harness& harness, std::ostream& out) {
  const auto& config = harness.config();
  const auto dataset = load_cli_dataset(options, config);
  const auto search = search_options(options, config);
  const Scheduler scheduler(effective_concurrency(options, config));

  const auto n = dataset.questions.size();
  std::vector<std::optional<SearchResult>> results(n);
  std::vector<std::optional<json>> failures(n);
  scheduler.for_each(n, [&](std::size_t i) {
    try {
      results[i] = search_optimal_budget(harness.backend(), dataset.questions[i], search);
    } catch (const SearchAborted& e) {
      failures[i] = json{{"question_id", dataset.questions[i].id},
                         {"status", "error"},
                         {"error", e.what()},
                         {"partial", e.partial()}};
    }
  });

  std::string jsonl;
  std::string csv = std::string(kElasticityCsvHeader) + "\n";
  std::map<std::string, std::size_t> counts;
  for (std::size_t i = 0; i < n; ++i) {
    if (results[i]) {
      jsonl += json(*results[i]).dump() + "\n";
      csv += elasticity_csv_rows(*results[i]);
      ++counts[std::string(to_string(results[i]->status))];
    } else {
      jsonl += failures[i]->dump() + "\n";
      ++counts["error"];
    }
  }
  write_file(harness.out_dir() / "search_results.jsonl", jsonl);
  write_file(harness.out_dir() / "elasticity.csv", csv);

  auto manifest = run_manifest("search", options, harness, dataset);
  manifest["baseline"] = options.baseline;
  manifest["status_counts"] = counts;
  write_file(harness.out_dir() / "search_manifest.json", manifest.dump(2) + "\n");

  out << fmt::format("searched {} questions:", n);
  for (const auto& [status, count] : counts) out << fmt::format(" {}={}", status, count);
  out << '\n';
  return counts.count("error") ? kExitPartial : kExitOk;
}

int cmd_elasticity(const CliOptions& options, const fs::path& out_dir, std::ostream& out) {
  const auto k = parse_k(options.k);
  const auto loaded = load_search_output(search_output_path(options, out_dir));

  std::map<std::string, std::int64_t> estimates;
  if (options.estimates) {
    std::ifstream in(*options.estimates);
    if (!in) throw ConfigError(fmt::format("estimates file {} not found", options.estimates->string()));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = json::parse(line);
      if (j.contains("estimate") && !j.at("estimate").is_null())
        estimates[j.at("question_id").get<std::string>()] = j.at("estimate").get<std::int64_t>();
    }
  }

  std::string ranges_jsonl;
  json skipped = json::array();
  std::vector<EstimatorSample> samples;
  std::size_t analysed = 0;
  for (const auto& result : loaded.results) {
    if (result.status != SearchStatus::found) {
      skipped.push_back({{"question_id", result.question_id}, {"reason", to_string(result.status)}});
      continue;
    }
    IdealRange range;
    try {
      range = ideal_budget_range(result.trace, k);
    } catch (const DomainError& e) {
      skipped.push_back({{"question_id", result.question_id}, {"reason", e.what()}});
      continue;
    }
    ++analysed;
    json row = {{"question_id", result.question_id},
                {"optimal_budget", result.optimal_budget->tokens()},
                {"ideal_range", range}};
    if (auto it = estimates.find(result.question_id); it != estimates.end()) {
      const Budget estimate(std::max<std::int64_t>(1, it->second));
      row["estimate"] = estimate.tokens();
      row["in_range"] = in_ideal_range(estimate, range);
      row["distance"] = distance_to_range(estimate, range);
      samples.push_back(EstimatorSample{estimate, range});
    }
    ranges_jsonl += row.dump() + "\n";
  }

  json report = {{"search_rows", loaded.results.size() + loaded.error_rows},
                 {"analysed", analysed},
                 {"k", options.k},
                 {"skipped", std::move(skipped)}};
  out << fmt::format("ideal budget ranges: {} analysed, {} skipped\n", analysed,
                     report["skipped"].size());
  if (!samples.empty()) {
    const auto quality = estimator_quality(samples);
    report["estimator_quality"] = {
        {"samples", quality.samples},
        {"in_range", quality.in_range},
        {"in_range_accuracy", quality.in_range_accuracy},
        {"out_of_range_distance", quality.out_of_range_distance
                                      ? json(*quality.out_of_range_distance)
                                      : json(nullptr)}};
    out << fmt::format("in-range accuracy: {:.2f}% over {} estimates\n",
                       100.0 * quality.in_range_accuracy, quality.samples);
    out << (quality.out_of_range_distance
                ? fmt::format("out-of-range distance: {:.2f} tokens\n", *quality.out_of_range_distance)
                : std::string("out-of-range distance: - (all estimates in range)\n"));
  }
  write_file(out_dir / "ideal_ranges.jsonl", ranges_jsonl);
  write_file(out_dir / "elasticity_report.json", report.dump(2) + "\n");
  return kExitOk;
}

int cmd_ptdata(const CliOptions& options, Harness& harness, std::ostream& out) {
  const auto& config = harness.config();
  const auto dataset = load_cli_dataset(options, config);
  const auto format = options.format.empty() ? CorpusFormat::sft
                                             : corpus_format_from_string(options.format);
  const PtOptions pt{search_options(options, config),
                     target_input_style_from_string(options.input_style)};
  const Scheduler scheduler(effective_concurrency(options, config));

  const auto n = dataset.questions.size();
  std::vector<std::optional<SearchResult>> searches(n);
  std::vector<std::string> errors(n);
  scheduler.for_each(n, [&](std::size_t i) {
    try {
      searches[i] = search_optimal_budget(harness.backend(), dataset.questions[i], pt.search);
    } catch (const SearchAborted& e) {
      errors[i] = e.what();
    }
  });

  bool partial = false;
  const CorpusProvenance provenance{dataset.name, harness.backend().model_id(), config.hash, {}};
  const auto path =
      harness.out_dir() / "ptdata" / fmt::format("{}.{}.jsonl", file_safe(dataset.name), to_string(format));
  CorpusManifest manifest;
  if (format == CorpusFormat::sft) {
    std::vector<SftOutcome> outcomes;
    for (std::size_t i = 0; i < n; ++i) {
      if (!searches[i]) {
        partial = true;
        outcomes.emplace_back(SkipReason{dataset.questions[i].id, "backend_error"});
      } else {
        outcomes.push_back(target_from_search(dataset.questions[i], *searches[i], pt));
      }
    }
    manifest = export_corpus(outcomes, path, provenance);
  } else {
    std::vector<PairOutcome> outcomes;
    for (std::size_t i = 0; i < n; ++i) {
      if (!searches[i]) {
        partial = true;
        outcomes.emplace_back(SkipReason{dataset.questions[i].id, "backend_error"});
      } else {
        outcomes.push_back(pair_from_search(dataset.questions[i], *searches[i], pt));
      }
    }
    manifest = export_corpus(outcomes, path, provenance);
  }

  out << fmt::format("{} corpus: attempted {}, exported {}, skipped {}", to_string(format),
                     manifest.attempted, manifest.succeeded, manifest.skipped);
  for (const auto& [reason, count] : manifest.skip_reasons) out << fmt::format(" [{}={}]", reason, count);
  out << fmt::format("\nwrote {}\n", path.string());
  return partial ? kExitPartial : kExitOk;
}

int cmd_audit(const CliOptions& options, Harness& harness, std::ostream& out) {
  const auto& config = harness.config();
  const auto dataset = load_cli_dataset(options, config);
  const auto multipliers = parse_multipliers(options.multipliers);
  const auto loaded = load_search_output(search_output_path(options, harness.out_dir()));

  std::map<std::string, const Question*> by_id;
  for (const auto& q : dataset.questions) by_id[q.id] = &q;

  const AuditOptions audit_options{effective_sampling(options, config), config.templates};
  const auto n = loaded.results.size();
  std::vector<std::optional<AuditResult>> audited(n);
  std::vector<std::optional<SkippedAudit>> skipped(n);
  std::vector<bool> failed(n, false);
  const Scheduler scheduler(effective_concurrency(options, config));
  scheduler.for_each(n, [&](std::size_t i) {
    const auto& result = loaded.results[i];
    if (result.status != SearchStatus::found || !result.optimal_budget) {
      skipped[i] = SkippedAudit{result.question_id, std::string(to_string(result.status))};
      return;
    }
    auto it = by_id.find(result.question_id);
    if (it == by_id.end()) {
      skipped[i] = SkippedAudit{result.question_id, "not_in_dataset"};
      return;
    }
    try {
      audited[i] = monotonicity_audit(harness.backend(), *it->second, *result.optimal_budget,
                                      multipliers, audit_options);
    } catch (const Error& e) {
      skipped[i] = SkippedAudit{result.question_id, fmt::format("backend_error: {}", e.what())};
      failed[i] = true;
    }
  });

  std::vector<AuditResult> results;
  std::vector<SkippedAudit> skips;
  std::string jsonl;
  for (std::size_t i = 0; i < n; ++i) {
    if (audited[i]) {
      jsonl += json(*audited[i]).dump() + "\n";
      results.push_back(std::move(*audited[i]));
    } else {
      skips.push_back(std::move(*skipped[i]));
    }
  }
  const auto cohort = summarize_audit(std::move(results), std::move(skips));
  write_file(harness.out_dir() / "audit.jsonl", jsonl);
  write_file(harness.out_dir() / "audit_report.json", json(cohort).dump(2) + "\n");

  out << fmt::format("monotonic: {}/{} ({:.2f}%)\n", cohort.monotonic_count, cohort.results.size(),
                     100.0 * cohort.monotonic_fraction);
  out << fmt::format("{:>12} {:>8} {:>8} {:>14}\n", "multiplier", "N", "ACC(%)", "Output Tokens");
  for (const auto& m : cohort.per_multiplier)
    out << fmt::format("{:>12g} {:>8} {:>8.2f} {:>14.2f}\n", m.multiplier, m.samples,
                       100.0 * m.accuracy, m.mean_output_tokens);
  if (!cohort.skipped.empty()) out << fmt::format("skipped: {}\n", cohort.skipped.size());

  auto manifest = run_manifest("audit", options, harness, dataset);
  manifest["multipliers"] = multipliers;
  write_file(harness.out_dir() / "audit_manifest.json", manifest.dump(2) + "\n");
  return std::find(failed.begin(), failed.end(), true) != failed.end() ? kExitPartial : kExitOk;
}

// ---- entry point ----------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CliOptions options;
  CLI::App app{"Token-budget-aware reasoning harness: budget search, estimate-then-prompt "
               "evaluation, elasticity analysis and training-corpus export.",
               "budgetcot"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, dataset_path, out_dir, search_output, estimates;
  std::uint64_t seed = 0;
  std::size_t sample_n = 0;
  unsigned concurrency = 0;

  auto* config_opt = app.add_option("--config", config_path, "Harness config file (JSON)");
  app.add_option("--dataset", dataset_path, "Dataset file (GSM8K JSONL, MathBench JSON or scripted JSON)");
  app.add_option("--dataset-format", options.dataset_format,
                 "auto|gsm8k_jsonl|mathbench_json|scripted_json")
      ->capture_default_str();
  auto* out_opt = app.add_option("--out-dir", out_dir, "Output directory (overrides config output_dir)");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for sampling and requests (default: config, 1024)");
  auto* sample_opt = app.add_option("--sample-n", sample_n, "Evaluate a seeded subsample of N questions");
  auto* conc_opt = app.add_option("--concurrency", concurrency, "Questions processed in parallel (default: config, 4)");
  app.add_option("--baseline", options.baseline,
                 "Reference cost for the first halved budget: probe (budgeted query at the vanilla "
                 "cost) or vanilla (unbudgeted cost)")
      ->check(CLI::IsMember({"probe", "vanilla"}))
      ->capture_default_str();
  app.add_option("--alpha", options.alpha, "Scale factor applied to estimated budgets (ep)")
      ->capture_default_str();
  app.add_option("--k", options.k, "Ideal-range window size: auto (N/3) or an integer")
      ->capture_default_str();
  app.add_option("--multipliers", options.multipliers,
                 "Comma-separated multiples of the optimal budget for the audit")
      ->capture_default_str();
  app.add_option("--format", options.format,
                 "eval: text|csv|json report; ptdata: sft|dpo corpus");
  app.add_option("--token-accounting", options.token_accounting,
                 "Output-token column: answer (answer call only) or all (estimation included)")
      ->check(CLI::IsMember({"answer", "all"}))
      ->capture_default_str();

  auto* eval = app.add_subcommand("eval", "Run prompting methods over a dataset and report ACC, tokens, expense");
  eval->add_option("--methods", options.methods, "Comma-separated: direct,vanilla,ep,budget:N")
      ->capture_default_str();
  auto* search = app.add_subcommand("search", "Search the optimal token budget for every question");
  auto* elasticity = app.add_subcommand("elasticity", "Ideal budget ranges and estimator quality from search output");
  auto* search_out_opt = elasticity->add_option("--search-output", search_output,
                                                "search_results.jsonl (default: <out-dir>/search_results.jsonl)");
  auto* estimates_opt = elasticity->add_option("--estimates", estimates,
                                               "Per-sample ep records carrying budget estimates");
  auto* ptdata = app.add_subcommand("ptdata", "Export SFT targets or DPO pairs found by budget search");
  ptdata->add_option("--input-style", options.input_style,
                     "Corpus input field: vanilla or budgeted instruction")
      ->check(CLI::IsMember({"vanilla", "budgeted"}))
      ->capture_default_str();
  auto* audit = app.add_subcommand("audit", "Check correctness monotonicity around each optimal budget");
  auto* audit_search_opt = audit->add_option("--search-output", search_output,
                                             "search_results.jsonl (default: <out-dir>/search_results.jsonl)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitFatal;
  }

  options.config = config_path;
  options.dataset = dataset_path;
  if (*out_opt) options.out_dir = fs::path(out_dir);
  if (*seed_opt) options.seed = seed;
  if (*sample_opt) options.sample_n = sample_n;
  if (*conc_opt) options.concurrency = concurrency;
  if (*search_out_opt || *audit_search_opt) options.search_output = fs::path(search_output);
  if (*estimates_opt) options.estimates = fs::path(estimates);

  try {
    if (elasticity->parsed()) {
      fs::path dir;
      if (options.out_dir) {
        dir = *options.out_dir;
      } else if (*config_opt) {
        dir = load_config(options.config).output_dir;
      } else {
        throw ConfigError("elasticity needs --out-dir or --config");
      }
      return cmd_elasticity(options, dir, out);
    }

    if (!*config_opt) throw ConfigError("--config is required");
    auto config = load_config(options.config);
    Harness harness(config, resolve_out_dir(options, config));
    if (eval->parsed()) return cmd_eval(options, harness, out);
    if (search->parsed()) return cmd_search(options, harness, out);
    if (ptdata->parsed()) return cmd_ptdata(options, harness, out);
    if (audit->parsed()) return cmd_audit(options, harness, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFatal;
  }
  return kExitFatal;
}

}  // namespace budgetcot
