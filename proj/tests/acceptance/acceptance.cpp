// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "budgetcot/audit.hpp"
#include "budgetcot/cli.hpp"
#include "budgetcot/dataset.hpp"
#include "budgetcot/elasticity.hpp"
#include "budgetcot/estimate.hpp"
#include "budgetcot/eval.hpp"
#include "budgetcot/grading.hpp"
#include "budgetcot/ptdata.hpp"
#include "budgetcot/report.hpp"
#include "budgetcot/scripted_backend.hpp"
#include "budgetcot/search.hpp"
#include "search_oracle.hpp"
#include "test_util.hpp"

using namespace budgetcot;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

/// Collects failure messages for one criterion.
struct Check {
  std::vector<std::string> failures;
  std::string note;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double ceil_log2(std::int64_t n) { return std::ceil(std::log2(static_cast<double>(n))); }

// ---- random scripted curves ------------------------------------------------

struct RandomCase {
  Question question;
  oracle::Curve curve;
  bool probe = true;
};

std::vector<RandomCase> random_cases(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<RandomCase> cases;
  for (std::size_t i = 0; i < count; ++i) {
    RandomCase c;
    c.question = testutil::numeric_question(fmt::format("r{}", i),
                                            fmt::format("Random curve question number {} asks for 12.", i), "12");
    const auto ub = std::uniform_int_distribution<std::int64_t>(8, 4096)(rng);
    const auto threshold = std::uniform_int_distribution<std::int64_t>(1, ub)(rng);
    const bool u_shaped = std::bernoulli_distribution(0.5)(rng);
    const double log_ub = std::log2(static_cast<double>(ub));
    const double bottom = std::uniform_real_distribution<double>(0.0, log_ub)(rng);
    const double scale = std::uniform_real_distribution<double>(0.2, 1.0)(rng) * static_cast<double>(ub);
    std::uniform_int_distribution<std::int64_t> noise(-3, 3);

    auto cost_at = [&](std::int64_t b) {
      const double x = std::log2(static_cast<double>(b));
      double cost = u_shaped ? scale * (0.3 + 0.7 * (x - bottom) * (x - bottom) / (log_ub * log_ub))
                             : scale * std::pow(static_cast<double>(b) / static_cast<double>(ub), 0.7);
      return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(cost)) + noise(rng));
    };

    c.curve.vanilla = {ub, std::bernoulli_distribution(0.9)(rng)};
    for (auto b = ub; b > 0; b /= 2) c.curve.budgeted[b] = {cost_at(b), b >= threshold};
    c.probe = i % 4 != 3;
    cases.push_back(std::move(c));
  }
  return cases;
}

SearchResult search_case(const RandomCase& c) {
  ScriptedBackend backend(testutil::script_of({testutil::behavior_for(c.question, c.curve)}));
  SearchOptions options;
  options.baseline = c.probe ? BaselineMode::probe : BaselineMode::vanilla;
  return search_optimal_budget(backend, c.question, options);
}

// ---- criteria ----------------------------------------------------------------

Check search_oracle_equivalence() {
  Check check;
  const auto cases = random_cases(200, 20240601);
  const auto start = Clock::now();
  std::vector<SearchResult> results;
  for (const auto& c : cases) results.push_back(search_case(c));
  const double elapsed = seconds_since(start);

  std::size_t found = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto expected = oracle::simulate(cases[i].curve, cases[i].probe);
    const auto& got = results[i];
    const auto id = cases[i].question.id;
    check.expect(got.optimal_budget.has_value() == expected.optimal.has_value(), id + ": status");
    if (got.optimal_budget && expected.optimal) {
      ++found;
      check.expect(got.optimal_budget->tokens() == *expected.optimal,
                   fmt::format("{}: beta* {} vs oracle {}", id, got.optimal_budget->tokens(), *expected.optimal));
    }
    bool same_trace = got.trace.points.size() == expected.trace.size();
    for (std::size_t k = 0; same_trace && k < expected.trace.size(); ++k) {
      const auto& p = got.trace.points[k];
      same_trace = p.budget.tokens() == expected.trace[k].budget &&
                   p.observed_cost == expected.trace[k].cost && p.correct == expected.trace[k].correct;
    }
    check.expect(same_trace, id + ": trace differs from oracle");
  }
  check.expect(elapsed < 1.0, fmt::format("took {:.3f} s", elapsed));
  check.note = fmt::format("200 curves, {} with a budget, {:.3f} s", found, elapsed);
  return check;
}

Check search_complexity() {
  Check check;
  std::size_t searches = 0;
  auto verify = [&](const SearchResult& r) {
    ++searches;
    const double limit = r.upper_bound >= 1 ? ceil_log2(r.upper_bound) + 2 : 2;
    check.expect(static_cast<double>(r.completions) <= limit,
                 fmt::format("{}: {} completions for upper bound {}", r.question_id, r.completions, r.upper_bound));
  };
  for (const auto& c : random_cases(200, 77)) verify(search_case(c));
  for (const char* fixture : {"cohort.json", "eval3.json"}) {
    ScriptedBackend backend(load_scripted_script(testutil::fixture(fixture)));
    for (const auto& b : backend.script().behaviors) {
      verify(search_optimal_budget(backend, b.question));
      SearchOptions vanilla;
      vanilla.baseline = BaselineMode::vanilla;
      verify(search_optimal_budget(backend, b.question, vanilla));
    }
  }
  check.note = fmt::format("{} searches within ceil(log2 ub) + 2", searches);
  return check;
}

Check elasticity_reproduction() {
  Check check;
  ScriptedBackend backend(load_scripted_script(testutil::fixture("cohort.json")));
  const auto& q = backend.script().behaviors[0].question;
  const auto r = search_optimal_budget(backend, q);
  check.expect(r.optimal_budget && r.optimal_budget->tokens() == 64, "beta* is not 64");
  const std::vector<std::tuple<std::int64_t, std::int64_t, bool>> derived{
      {256, 130, true}, {128, 120, true}, {64, 70, true}, {32, 90, true}};
  check.expect(r.trace.points.size() == derived.size(), "trace length");
  for (std::size_t i = 0; i < std::min(derived.size(), r.trace.points.size()); ++i) {
    const auto& [b, cost, ok] = derived[i];
    const auto& p = r.trace.points[i];
    check.expect(p.budget.tokens() == b && p.observed_cost == cost && p.correct == ok,
                 fmt::format("trace point {}", i));
  }
  const auto csv = elasticity_csv_rows(r);
  check.expect(csv == "elastic-1,0,256,130,true\nelastic-1,1,128,120,true\n"
                      "elastic-1,2,64,70,true\nelastic-1,3,32,90,true\n",
               "csv rows");
  const SamplingParams params;
  const auto at10 = backend.complete(build_prompt(q, prompt_kind::BudgetedCot{Budget(10)}), params);
  const auto at50 = backend.complete(build_prompt(q, prompt_kind::BudgetedCot{Budget(50)}), params);
  check.expect(at10.usage.output_tokens == 157 && at50.usage.output_tokens == 86,
               "budget 10 / 50 costs");
  check.note = "beta* = 64, rebound 70 -> 90 at budget 32, 157 tokens at 10 vs 86 at 50";
  return check;
}

Check window_oracle() {
  Check check;
  std::mt19937_64 rng(1234);
  double library_seconds = 0;
  std::size_t comparisons = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = std::uniform_int_distribution<std::size_t>(3, 300)(rng);
    std::vector<std::int64_t> costs(n);
    std::vector<CostPoint> pts;
    const auto ub = std::int64_t{1} << 40;
    for (std::size_t i = 0; i < n; ++i) {
      costs[i] = std::uniform_int_distribution<std::int64_t>(1, 500)(rng);
      pts.push_back(CostPoint{Budget(std::max<std::int64_t>(1, ub - static_cast<std::int64_t>(i))), costs[i]});
    }
    for (std::optional<std::size_t> k : {std::optional<std::size_t>{}, std::optional<std::size_t>{1},
                                         std::optional<std::size_t>{2}, std::optional<std::size_t>{5}}) {
      const auto effective = k.value_or(std::max<std::size_t>(1, n / 3));
      if (effective > n) continue;
      const auto start = Clock::now();
      const auto got = ideal_budget_range(pts, k);
      library_seconds += seconds_since(start);
      const auto expected = oracle::brute_force_window(costs, effective);
      ++comparisons;
      check.expect(got.window_size == effective && got.start_index == expected.start &&
                       got.total_cost == expected.total,
                   fmt::format("trial {} n={} k={}", trial, n, effective));
    }
  }
  check.expect(library_seconds < 1.0, fmt::format("took {:.3f} s", library_seconds));
  check.note = fmt::format("{} windows, {:.3f} s", comparisons, library_seconds);
  return check;
}

Check estimator_quality_arithmetic() {
  Check check;
  auto range = [](std::vector<std::int64_t> budgets) {
    IdealRange r;
    for (auto b : budgets) r.window_budgets.emplace_back(b);
    r.window_size = budgets.size();
    return r;
  };
  const std::vector<EstimatorSample> samples{{Budget(50), range({64, 32})},
                                             {Budget(100), range({80, 60, 40})},
                                             {Budget(16), range({16})}};
  const auto q = estimator_quality(samples);
  check.expect(q.in_range_accuracy == 2.0 / 3.0, "accuracy is not 2/3");
  check.expect(q.out_of_range_distance && *q.out_of_range_distance == 20.0, "distance is not 20");
  check.note = fmt::format("accuracy {:.4f}, distance {}", q.in_range_accuracy,
                           q.out_of_range_distance ? *q.out_of_range_distance : -1.0);
  return check;
}

Check prompt_bytes() {
  Check check;
  const auto q = testutil::numeric_question("p", "Q", "1");
  check.expect(build_prompt(q, prompt_kind::VanillaCot{}).user == "Q\nLet's think step by step:", "vanilla");
  check.expect(std::string(kBudgetedCotInstruction) ==
                   "Let's think step by step and use less than {budget} tokens:",
               "budgeted template");
  check.expect(build_prompt(q, prompt_kind::BudgetedCot{Budget(50)}).user ==
                   "Q\nLet's think step by step and use less than 50 tokens:",
               "rendered example");
  const auto estimation = build_estimation_prompt(q).user;
  check.expect(estimation.rfind(
                   "Task: Analyze the given question and estimate the minimum number of tokens "
                   "required for reasoning.\n",
                   0) == 0,
               "estimation task line");
  check.note = "vanilla, budgeted, example and estimation lines verbatim";
  return check;
}

ScriptedBehavior audited_question(int i, bool monotonic) {
  ScriptedBehavior b;
  b.question = testutil::numeric_question(fmt::format("a{}", i), fmt::format("Audit item {} asks for 5.", i), "5");
  b.no_budget = testutil::reply(256);
  b.cost_curve[16] = testutil::reply(30, false);
  b.cost_curve[32] = testutil::reply(40, !monotonic);
  b.cost_curve[64] = testutil::reply(50);
  b.cost_curve[128] = testutil::reply(80);
  b.cost_curve[256] = testutil::reply(120);
  return b;
}

Check monotonicity_audit_check() {
  Check check;
  const auto multipliers = default_audit_multipliers();
  std::vector<AuditPoint> pattern;
  const bool verdicts[] = {false, false, true, true, true};
  for (std::size_t i = 0; i < 5; ++i)
    pattern.push_back(AuditPoint{multipliers[i], scaled_budget(Budget(64), multipliers[i]), verdicts[i], 0});
  check.expect(is_monotonic(pattern), "F F T T T not monotonic");

  std::vector<ScriptedBehavior> behaviors;
  for (int i = 0; i < 11; ++i) behaviors.push_back(audited_question(i, i != 4));
  ScriptedBackend backend(testutil::script_of(behaviors));
  std::vector<AuditResult> results;
  for (const auto& b : backend.script().behaviors)
    results.push_back(monotonicity_audit(backend, b.question, Budget(64), multipliers));
  const auto cohort = summarize_audit(std::move(results), {});
  const double percent = std::round(10000.0 * cohort.monotonic_fraction) / 100.0;
  check.expect(cohort.monotonic_count == 10 && percent == 90.91,
               fmt::format("cohort {:.2f}%", percent));
  check.note = fmt::format("pattern monotonic, cohort {}/11 = {:.2f}%", cohort.monotonic_count, percent);
  return check;
}

Check metrics_arithmetic() {
  Check check;
  ScriptedBackend backend(load_scripted_script(testutil::fixture("eval3.json")));
  const auto dataset = load_dataset(testutil::fixture("eval3.json"), DatasetFormat::scripted_json);
  PricingBook pricing;
  pricing.add(PricingTable{"scripted-mock", 0.15, 0.60});
  const auto run = run_method(backend, dataset, Method::parse("vanilla"), pricing);
  check.expect(std::round(run.report.accuracy * 1000) / 1000 == 0.667 && run.report.correct_count == 2,
               "accuracy");
  check.expect(run.report.mean_output_tokens == 20.0, "mean tokens");
  const double expense = compute_expense(TokenUsage{100, 200, CountingSource::provider_reported},
                                         PricingTable{"gpt-4o-mini", 0.15, 0.60});
  check.expect(expense == 13.5, fmt::format("expense {}", expense));
  const auto reduction = token_reduction_percent(148.72, 461.25);
  check.expect(reduction && std::abs(*reduction - 67.0) <= 1.0, "token reduction");
  check.note = fmt::format("acc {:.3f}, tokens {}, expense {}, reduction {:.2f}%", run.report.accuracy,
                           run.report.mean_output_tokens, expense, reduction.value_or(0));
  return check;
}

Check corpus_integrity() {
  Check check;
  ScriptedBackend backend(load_scripted_script(testutil::fixture("cohort.json")));
  std::vector<SftOutcome> sft;
  std::vector<PairOutcome> pairs;
  for (const auto& b : backend.script().behaviors) {
    sft.push_back(generate_target(backend, b.question));
    pairs.push_back(build_preference_pair(backend, b.question));
  }
  testutil::TempDir dir("acceptance-pt");
  const CorpusProvenance provenance{"cohort", backend.model_id(), "fixture", "2000-01-01T00:00:00Z"};
  const auto sft_manifest = export_corpus(sft, dir / "cohort.sft.jsonl", provenance);
  const auto dpo_manifest = export_corpus(pairs, dir / "cohort.dpo.jsonl", provenance);

  check.expect(sft_manifest.attempted == 4 && sft_manifest.succeeded == 3 && sft_manifest.skipped == 1,
               "sft manifest counts");
  check.expect(dpo_manifest.attempted == 4 && dpo_manifest.succeeded <= 3 &&
                   dpo_manifest.succeeded + dpo_manifest.skipped == 4,
               "dpo manifest counts");
  const auto on_disk = load_manifest(manifest_path_for(dir / "cohort.sft.jsonl"));
  check.expect(on_disk.succeeded == 3 && on_disk.skipped == 1 &&
                   on_disk.skip_reasons.count("vanilla_incorrect") == 1,
               "manifest file");

  std::vector<SftExample> written;
  for (const auto& o : sft)
    if (auto* e = std::get_if<SftExample>(&o)) written.push_back(*e);
  const auto loaded = load_sft_corpus(dir / "cohort.sft.jsonl");
  check.expect(loaded.size() == 3 && loaded == written, "sft export -> load");
  for (const auto& e : loaded)
    check.expect(grade(e.target, e.meta.gold_answer, e.meta.answer_kind).correct, e.meta.question_id + " target");

  std::vector<PreferencePair> written_pairs;
  for (const auto& o : pairs)
    if (auto* p = std::get_if<PreferencePair>(&o)) written_pairs.push_back(*p);
  const auto loaded_pairs = load_dpo_corpus(dir / "cohort.dpo.jsonl");
  check.expect(loaded_pairs == written_pairs, "dpo export -> load");
  for (const auto& p : loaded_pairs) {
    check.expect(grade(p.chosen, p.meta.gold_answer, p.meta.answer_kind).correct, p.meta.question_id + " chosen");
    check.expect(p.chosen_tokens < p.rejected_tokens, p.meta.question_id + " length");
  }
  check.note = fmt::format("{} SFT records, {} DPO pairs", loaded.size(), loaded_pairs.size());
  return check;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root))
    // The response cache is an append journal; its line order follows thread completion.
    if (entry.is_regular_file() && entry.path().filename() != "cache.jsonl")
      files[fs::relative(entry.path(), root).string()] = testutil::read_file(entry.path());
  return files;
}

Check determinism_and_resume() {
  Check check;
  const auto config_path = testutil::fixture("scripted_config.json");
  const auto config = load_config(config_path);
  CliOptions options;
  options.config = config_path;
  options.methods = "direct,vanilla,ep,budget:64";
  std::ostringstream sink;

  testutil::TempDir a("acceptance-a");
  testutil::TempDir b("acceptance-b");
  for (const auto* dir : {&a, &b}) {
    Harness harness(config, dir->path());
    check.expect(cmd_eval(options, harness, sink) == kExitOk, "eval exit");
    check.expect(cmd_search(options, harness, sink) == kExitOk, "search exit");
  }
  const auto ta = tree(a.path());
  check.expect(ta == tree(b.path()), "outputs differ between runs");
  check.expect(ta.count("report.txt") && ta.count("search_results.jsonl") && ta.count("elasticity.csv"),
               "expected outputs missing");

  testutil::TempDir r("acceptance-resume");
  auto make_upstream = [] {
    return std::make_unique<ScriptedBackend>(load_scripted_script(testutil::fixture("cohort.json")));
  };
  std::map<std::string, std::size_t> first;
  {
    auto upstream = make_upstream();
    upstream->fail_after(7);
    auto* raw = upstream.get();
    Harness harness(config, r.path(), std::move(upstream));
    check.expect(cmd_eval(options, harness, sink) == kExitPartial, "interrupted run should be partial");
    first = raw->calls_by_fingerprint();
  }
  std::size_t duplicates = 0;
  std::size_t resumed_calls = 0;
  {
    auto upstream = make_upstream();
    auto* raw = upstream.get();
    Harness harness(config, r.path(), std::move(upstream));
    check.expect(cmd_eval(options, harness, sink) == kExitOk, "resumed run exit");
    check.expect(cmd_search(options, harness, sink) == kExitOk, "resumed search exit");
    for (const auto& [fingerprint, count] : raw->calls_by_fingerprint()) {
      resumed_calls += count;
      duplicates += (count - 1) + first.count(fingerprint);
    }
  }
  check.expect(duplicates == 0, fmt::format("{} duplicate upstream calls", duplicates));
  check.expect(testutil::read_file(r / "report.txt") == ta.at("report.txt"), "resumed report differs");
  check.expect(testutil::read_file(r / "search_results.jsonl") == ta.at("search_results.jsonl"),
               "resumed search differs");
  check.note = fmt::format("{} files identical; resume: {} + {} upstream calls, {} duplicates", ta.size(),
                           first.size(), resumed_calls, duplicates);
  return check;
}

Check ep_contract() {
  Check check;
  ScriptedBehavior b;
  b.question = testutil::numeric_question("fig1", "Mia buys 4 boxes of 6 muffins and gives away 6. How many are left?", "18");
  b.no_budget = testutil::reply(258);
  b.estimation = ScriptedResponse{"50", 1, true};
  for (const auto& [budget, cost] : std::vector<std::pair<std::int64_t, std::int64_t>>{
           {258, 200}, {129, 150}, {64, 100}, {50, 86}, {32, 95}, {16, 130}, {10, 157}})
    b.cost_curve[budget] = testutil::reply(cost);
  const auto script = testutil::script_of({b});

  ScriptedBackend sweep_backend(script);
  ElasticityTrace sweep;
  for (const auto& [budget, response] : std::map<std::int64_t, ScriptedResponse, std::greater<>>(
           b.cost_curve.begin(), b.cost_curve.end())) {
    auto outcome = sweep_backend.complete(build_prompt(b.question, prompt_kind::BudgetedCot{Budget(budget)}), {});
    const bool ok = grade(outcome.text, b.question).correct;
    sweep.points.push_back(TracePoint{Budget(budget), outcome.usage.output_tokens, ok, std::move(outcome)});
  }
  const auto range = ideal_budget_range(sweep, std::nullopt);
  const auto vanilla = sweep_backend.complete(build_prompt(b.question, prompt_kind::VanillaCot{}), {});

  ScriptedBackend backend(script);
  const auto ep = run_ep(backend, b.question);
  check.expect(ep.estimate && in_ideal_range(ep.estimate->value, range), "estimate outside ideal range");
  check.expect(ep.answer_usage.output_tokens < vanilla.usage.output_tokens, "answer not cheaper than vanilla");
  check.expect(ep.answer_usage.output_tokens == 86 && vanilla.usage.output_tokens == 258, "86 vs 258");
  check.expect(ep.backend_calls == 2 && backend.calls() == 2, "backend calls != 2");
  check.expect(ep.verdict.correct, "answer graded wrong");
  check.note = fmt::format("estimate 50 in [{}, {}], {} < {} tokens, {} calls", range.min_budget().tokens(),
                           range.max_budget().tokens(), ep.answer_usage.output_tokens,
                           vanilla.usage.output_tokens, backend.calls());
  return check;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
      {"search oracle equivalence", search_oracle_equivalence},
      {"search complexity", search_complexity},
      {"elasticity reproduction", elasticity_reproduction},
      {"ideal-range window oracle", window_oracle},
      {"estimator-quality arithmetic", estimator_quality_arithmetic},
      {"prompt byte-exactness", prompt_bytes},
      {"monotonicity audit", monotonicity_audit_check},
      {"metrics arithmetic", metrics_arithmetic},
      {"training corpus integrity", corpus_integrity},
      {"determinism and resumability", determinism_and_resume},
      {"estimate-then-prompt contract", ep_contract},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check check;
    try {
      check = criteria[i].second();
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool pass = check.failures.empty();
    failed += pass ? 0 : 1;
    std::cout << fmt::format("[{}] criterion {:>2}: {}", pass ? "PASS" : "FAIL", i + 1, criteria[i].first);
    if (!check.note.empty()) std::cout << " (" << check.note << ")";
    std::cout << '\n';
    for (const auto& f : check.failures) std::cout << "       " << f << '\n';
  }
  std::cout << fmt::format("{}/{} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
