#include "budgetcot/ptdata.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <fmt/format.h>

#include "budgetcot/grading.hpp"

namespace budgetcot {

namespace {

std::string input_for(const Question& question, const SearchResult& search,
                      const PtOptions& options) {
  if (options.input_style == TargetInputStyle::budgeted && search.optimal_budget)
    return build_prompt(question, prompt_kind::BudgetedCot{*search.optimal_budget},
                        options.search.templates)
        .user;
  return build_prompt(question, prompt_kind::VanillaCot{}, options.search.templates).user;
}

json meta_json(const CorpusMeta& meta) {
  return json{{"question_id", meta.question_id},
              {"optimal_budget", meta.optimal_budget},
              {"gold_answer", meta.gold_answer},
              {"answer_kind", to_string(meta.answer_kind)}};
}

CorpusMeta meta_from_json(const json& j) {
  CorpusMeta meta;
  meta.question_id = j.at("question_id").get<std::string>();
  meta.optimal_budget = j.at("optimal_budget").get<std::int64_t>();
  meta.gold_answer = j.at("gold_answer").get<std::string>();
  meta.answer_kind = answer_kind_from_string(j.at("answer_kind").get<std::string>());
  return meta;
}

json record_json(const SftExample& e) {
  auto meta = meta_json(e.meta);
  meta["output_tokens"] = e.target_tokens;
  return json{{"input", e.input}, {"target", e.target}, {"meta", std::move(meta)}};
}

json record_json(const PreferencePair& p) {
  auto meta = meta_json(p.meta);
  meta["chosen_tokens"] = p.chosen_tokens;
  meta["rejected_tokens"] = p.rejected_tokens;
  return json{{"input", p.input},
              {"chosen", p.chosen},
              {"rejected", p.rejected},
              {"meta", std::move(meta)}};
}

void validate(const SftExample& e, std::size_t index) {
  if (e.input.empty()) throw CorpusSchemaError(index, "empty input");
  if (e.target.empty()) throw CorpusSchemaError(index, "empty target");
  if (e.meta.optimal_budget < 1) throw CorpusSchemaError(index, "optimal budget < 1");
  if (!grade(e.target, e.meta.gold_answer, e.meta.answer_kind).correct)
    throw CorpusSchemaError(index, "target does not grade correct");
}

void validate(const PreferencePair& p, std::size_t index) {
  if (p.input.empty()) throw CorpusSchemaError(index, "empty input");
  if (p.chosen.empty() || p.rejected.empty()) throw CorpusSchemaError(index, "empty response");
  if (p.meta.optimal_budget < 1) throw CorpusSchemaError(index, "optimal budget < 1");
  if (!(p.chosen_tokens < p.rejected_tokens))
    throw CorpusSchemaError(index, "chosen response is not shorter than rejected");
  if (!grade(p.chosen, p.meta.gold_answer, p.meta.answer_kind).correct)
    throw CorpusSchemaError(index, "chosen response does not grade correct");
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const CorpusManifest& m, const std::filesystem::path& path) {
  json skipped = json::array();
  for (const auto& s : m.skipped_questions)
    skipped.push_back({{"question_id", s.question_id}, {"reason", s.reason}});
  const json doc = {{"dataset", m.dataset},
                    {"model_id", m.model_id},
                    {"generated_at", m.generated_at},
                    {"config_hash", m.config_hash},
                    {"format", to_string(m.format)},
                    {"counts",
                     {{"attempted", m.attempted},
                      {"succeeded", m.succeeded},
                      {"skipped", m.skipped},
                      {"skip_reasons", m.skip_reasons}}},
                    {"skipped_questions", std::move(skipped)}};
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write manifest {}", path.string()));
  out << doc.dump(2) << '\n';
}

template <class Record>
CorpusManifest export_records(const std::vector<std::variant<Record, SkipReason>>& outcomes,
                              CorpusFormat format, const std::filesystem::path& path,
                              const CorpusProvenance& provenance) {
  if (outcomes.empty()) throw DomainError("nothing to export");

  CorpusManifest manifest;
  manifest.dataset = provenance.dataset;
  manifest.model_id = provenance.model_id;
  manifest.config_hash = provenance.config_hash;
  manifest.generated_at = provenance.generated_at.empty() ? utc_now() : provenance.generated_at;
  manifest.format = format;
  manifest.attempted = outcomes.size();

  std::vector<const Record*> records;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (const auto* record = std::get_if<Record>(&outcomes[i])) {
      validate(*record, i);
      records.push_back(record);
    } else {
      const auto& skip = std::get<SkipReason>(outcomes[i]);
      ++manifest.skip_reasons[skip.reason];
      manifest.skipped_questions.push_back(skip);
    }
  }
  manifest.succeeded = records.size();
  manifest.skipped = manifest.attempted - manifest.succeeded;

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write corpus {}", path.string()));
  for (const auto* record : records) out << record_json(*record).dump() << '\n';
  out.close();
  if (!out) throw Error(fmt::format("failed writing corpus {}", path.string()));

  write_manifest(manifest, manifest_path_for(path));
  return manifest;
}

template <class F>
void for_each_jsonl(const std::filesystem::path& path, F&& f) {
  std::ifstream in(path);
  if (!in) throw DatasetError(fmt::format("cannot open {}", path.string()), 0);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      f(json::parse(line));
    } catch (const json::exception& e) {
      throw DatasetError(fmt::format("{}: {}", path.string(), e.what()), number);
    }
  }
}

}  // namespace

TargetInputStyle target_input_style_from_string(std::string_view name) {
  if (name == "vanilla") return TargetInputStyle::vanilla;
  if (name == "budgeted") return TargetInputStyle::budgeted;
  throw DomainError(fmt::format("unknown input style '{}' (expected vanilla|budgeted)", name));
}

std::string_view to_string(CorpusFormat format) {
  return format == CorpusFormat::sft ? "sft" : "dpo";
}

CorpusFormat corpus_format_from_string(std::string_view name) {
  if (name == "sft") return CorpusFormat::sft;
  if (name == "dpo") return CorpusFormat::dpo;
  throw DomainError(fmt::format("unknown corpus format '{}' (expected sft|dpo)", name));
}

SftOutcome target_from_search(const Question& question, const SearchResult& search,
                              const PtOptions& options) {
  if (search.status != SearchStatus::found)
    return SkipReason{question.id, std::string(to_string(search.status))};
  if (!search.target || !search.optimal_budget || !grade(search.target->text, question).correct)
    return SkipReason{question.id, "target_ungradable"};

  SftExample example;
  example.input = input_for(question, search, options);
  example.target = search.target->text;
  example.target_tokens = search.target->usage.output_tokens;
  example.meta = {question.id, search.optimal_budget->tokens(), question.gold_answer,
                  question.answer_kind};
  return example;
}

PairOutcome pair_from_search(const Question& question, const SearchResult& search,
                             const PtOptions& options) {
  auto target = target_from_search(question, search, options);
  if (auto* skip = std::get_if<SkipReason>(&target)) return *skip;
  auto& example = std::get<SftExample>(target);

  const auto rejected_tokens = search.vanilla.usage.output_tokens;
  if (!(example.target_tokens < rejected_tokens)) return SkipReason{question.id, "length_inversion"};

  PreferencePair pair;
  pair.input = std::move(example.input);
  pair.chosen = std::move(example.target);
  pair.rejected = search.vanilla.text;
  pair.meta = std::move(example.meta);
  pair.chosen_tokens = example.target_tokens;
  pair.rejected_tokens = rejected_tokens;
  return pair;
}

SftOutcome generate_target(Backend& backend, const Question& question, const PtOptions& options) {
  return target_from_search(question, search_optimal_budget(backend, question, options.search),
                            options);
}

PairOutcome build_preference_pair(Backend& backend, const Question& question,
                                  const PtOptions& options) {
  return pair_from_search(question, search_optimal_budget(backend, question, options.search),
                          options);
}

std::filesystem::path manifest_path_for(const std::filesystem::path& corpus_path) {
  auto manifest = corpus_path;
  manifest += ".manifest.json";
  return manifest;
}

CorpusManifest export_corpus(const std::vector<SftOutcome>& outcomes,
                             const std::filesystem::path& path,
                             const CorpusProvenance& provenance) {
  return export_records(outcomes, CorpusFormat::sft, path, provenance);
}

CorpusManifest export_corpus(const std::vector<PairOutcome>& outcomes,
                             const std::filesystem::path& path,
                             const CorpusProvenance& provenance) {
  return export_records(outcomes, CorpusFormat::dpo, path, provenance);
}

std::vector<SftExample> load_sft_corpus(const std::filesystem::path& path) {
  std::vector<SftExample> out;
  for_each_jsonl(path, [&](const json& j) {
    SftExample e;
    e.input = j.at("input").get<std::string>();
    e.target = j.at("target").get<std::string>();
    e.meta = meta_from_json(j.at("meta"));
    e.target_tokens = j.at("meta").at("output_tokens").get<std::int64_t>();
    out.push_back(std::move(e));
  });
  return out;
}

std::vector<PreferencePair> load_dpo_corpus(const std::filesystem::path& path) {
  std::vector<PreferencePair> out;
  for_each_jsonl(path, [&](const json& j) {
    PreferencePair p;
    p.input = j.at("input").get<std::string>();
    p.chosen = j.at("chosen").get<std::string>();
    p.rejected = j.at("rejected").get<std::string>();
    p.meta = meta_from_json(j.at("meta"));
    p.chosen_tokens = j.at("meta").at("chosen_tokens").get<std::int64_t>();
    p.rejected_tokens = j.at("meta").at("rejected_tokens").get<std::int64_t>();
    out.push_back(std::move(p));
  });
  return out;
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError(fmt::format("cannot open {}", path.string()), 0);
  const auto doc = json::parse(in);
  CorpusManifest m;
  m.dataset = doc.at("dataset").get<std::string>();
  m.model_id = doc.at("model_id").get<std::string>();
  m.generated_at = doc.at("generated_at").get<std::string>();
  m.config_hash = doc.at("config_hash").get<std::string>();
  m.format = corpus_format_from_string(doc.at("format").get<std::string>());
  const auto& counts = doc.at("counts");
  m.attempted = counts.at("attempted").get<std::size_t>();
  m.succeeded = counts.at("succeeded").get<std::size_t>();
  m.skipped = counts.at("skipped").get<std::size_t>();
  m.skip_reasons = counts.at("skip_reasons").get<std::map<std::string, std::size_t>>();
  for (const auto& s : doc.at("skipped_questions"))
    m.skipped_questions.push_back(
        {s.at("question_id").get<std::string>(), s.at("reason").get<std::string>()});
  return m;
}

}  // namespace budgetcot
