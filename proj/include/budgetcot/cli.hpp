#pragma once

// Experiment verbs: eval | search | elasticity | ptdata | audit.
// Exit status: 0 on full success, 2 when some samples failed, 1 on fatal errors.

#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include "budgetcot/config.hpp"
#include "budgetcot/response_cache.hpp"

namespace budgetcot {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitPartial = 2;

struct CliOptions {
  std::filesystem::path config;
  std::filesystem::path dataset;
  /// auto | gsm8k_jsonl | mathbench_json | scripted_json
  std::string dataset_format = "auto";
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> sample_n;
  std::optional<unsigned> concurrency;
  std::string baseline = "probe";
  double alpha = 1.0;
  /// "auto" or a positive window size.
  std::string k = "auto";
  std::string multipliers = "0.25,0.5,1,2,4";
  /// Report format for eval (text|csv|json), corpus format for ptdata (sft|dpo).
  std::string format;
  std::string methods = "direct,vanilla,ep";
  std::optional<std::filesystem::path> search_output;
  std::optional<std::filesystem::path> estimates;
  /// vanilla | budgeted
  std::string input_style = "vanilla";
  /// answer | all
  std::string token_accounting = "answer";
};

/// Backend stack for one command: upstream (live or scripted) behind the response cache.
class Harness {
 public:
  /// Builds the upstream backend named by the config.
  Harness(HarnessConfig config, std::filesystem::path out_dir);
  /// Uses `upstream` as given; for tests and embedding.
  Harness(HarnessConfig config, std::filesystem::path out_dir, std::unique_ptr<Backend> upstream);

  Backend& backend() { return *caching_; }
  Backend& upstream() { return *upstream_; }
  const HarnessConfig& config() const { return config_; }
  const std::filesystem::path& out_dir() const { return out_dir_; }

 private:
  HarnessConfig config_;
  std::filesystem::path out_dir_;
  std::unique_ptr<RateLimiter> limiter_;
  std::unique_ptr<Backend> upstream_;
  std::unique_ptr<ResponseCache> cache_;
  std::unique_ptr<CachingBackend> caching_;
};

/// Output directory: --out-dir, else the config's output_dir.
std::filesystem::path resolve_out_dir(const CliOptions& options, const HarnessConfig& config);

int cmd_eval(const CliOptions& options, Harness& harness, std::ostream& out);
int cmd_search(const CliOptions& options, Harness& harness, std::ostream& out);
int cmd_elasticity(const CliOptions& options, const std::filesystem::path& out_dir,
                   std::ostream& out);
int cmd_ptdata(const CliOptions& options, Harness& harness, std::ostream& out);
int cmd_audit(const CliOptions& options, Harness& harness, std::ostream& out);

/// Parses argv and dispatches; never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace budgetcot
