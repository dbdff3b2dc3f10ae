#pragma once

// Training-corpus generation: token-efficient targets found by the budget
// search become SFT examples, and DPO pairs contrast them with the vanilla CoT
// response. Training itself happens elsewhere; this module only exports data.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "budgetcot/backend.hpp"
#include "budgetcot/search.hpp"

namespace budgetcot {

/// What the exported `input` field contains.
enum class TargetInputStyle {
  /// Question plus the plain "Let's think step by step:" instruction.
  vanilla,
  /// Question plus the budgeted instruction at the optimal budget.
  budgeted,
};

TargetInputStyle target_input_style_from_string(std::string_view name);

struct CorpusMeta {
  std::string question_id;
  std::int64_t optimal_budget = 0;
  /// Gold answer and kind, kept so export can re-grade every record.
  std::string gold_answer;
  AnswerKind answer_kind = AnswerKind::numeric;

  friend bool operator==(const CorpusMeta&, const CorpusMeta&) = default;
};

struct SftExample {
  std::string input;
  std::string target;
  CorpusMeta meta;
  std::int64_t target_tokens = 0;

  friend bool operator==(const SftExample&, const SftExample&) = default;
};

struct PreferencePair {
  std::string input;
  std::string chosen;
  std::string rejected;
  CorpusMeta meta;
  std::int64_t chosen_tokens = 0;
  std::int64_t rejected_tokens = 0;

  friend bool operator==(const PreferencePair&, const PreferencePair&) = default;
};

struct SkipReason {
  std::string question_id;
  /// vanilla_incorrect, no_feasible_budget, target_ungradable or length_inversion.
  std::string reason;

  friend bool operator==(const SkipReason&, const SkipReason&) = default;
};

using SftOutcome = std::variant<SftExample, SkipReason>;
using PairOutcome = std::variant<PreferencePair, SkipReason>;

struct PtOptions {
  SearchOptions search;
  TargetInputStyle input_style = TargetInputStyle::vanilla;
};

/// Builds the SFT example from a finished search.
SftOutcome target_from_search(const Question& question, const SearchResult& search,
                              const PtOptions& options = {});

/// Pairs the search target with the search's own vanilla response.
PairOutcome pair_from_search(const Question& question, const SearchResult& search,
                             const PtOptions& options = {});

SftOutcome generate_target(Backend& backend, const Question& question,
                           const PtOptions& options = {});
PairOutcome build_preference_pair(Backend& backend, const Question& question,
                                  const PtOptions& options = {});

enum class CorpusFormat { sft, dpo };

std::string_view to_string(CorpusFormat format);
CorpusFormat corpus_format_from_string(std::string_view name);

struct CorpusManifest {
  std::string dataset;
  std::string model_id;
  std::string generated_at;
  std::string config_hash;
  CorpusFormat format = CorpusFormat::sft;
  std::size_t attempted = 0;
  std::size_t succeeded = 0;
  std::size_t skipped = 0;
  std::map<std::string, std::size_t> skip_reasons;
  std::vector<SkipReason> skipped_questions;
};

struct CorpusProvenance {
  std::string dataset;
  std::string model_id;
  std::string config_hash;
  /// ISO-8601 UTC; filled with the current time when empty.
  std::string generated_at;
};

/// Path of the manifest written next to `corpus_path`.
std::filesystem::path manifest_path_for(const std::filesystem::path& corpus_path);

/// Writes the JSONL corpus and its manifest. Every record is re-graded and
/// schema-checked first; the first violation aborts with its index. Throws
/// DomainError on an empty record list.
CorpusManifest export_corpus(const std::vector<SftOutcome>& outcomes,
                             const std::filesystem::path& path, const CorpusProvenance& provenance);
CorpusManifest export_corpus(const std::vector<PairOutcome>& outcomes,
                             const std::filesystem::path& path, const CorpusProvenance& provenance);

std::vector<SftExample> load_sft_corpus(const std::filesystem::path& path);
std::vector<PreferencePair> load_dpo_corpus(const std::filesystem::path& path);
CorpusManifest load_manifest(const std::filesystem::path& path);

/// Raised when a record fails export validation.
class CorpusSchemaError : public Error {
 public:
  CorpusSchemaError(std::size_t index, const std::string& what)
      : Error("record " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace budgetcot
