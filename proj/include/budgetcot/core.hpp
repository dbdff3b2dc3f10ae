#pragma once

// Domain types shared by every module, plus token and expense accounting.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "budgetcot/errors.hpp"

namespace budgetcot {

enum class AnswerKind { numeric, multiple_choice, free_text };

std::string_view to_string(AnswerKind kind);
AnswerKind answer_kind_from_string(std::string_view name);

/// One benchmark item.
struct Question {
  std::string id;
  std::string text;
  std::string gold_answer;
  AnswerKind answer_kind = AnswerKind::numeric;
  std::string source;
};

/// A positive output-token limit. Construction throws DomainError for values < 1.
class Budget {
 public:
  explicit Budget(std::int64_t tokens);

  std::int64_t tokens() const noexcept { return tokens_; }

  friend auto operator<=>(const Budget&, const Budget&) = default;

 private:
  std::int64_t tokens_;
};

enum class CountingSource { provider_reported, local_approximation };

std::string_view to_string(CountingSource source);
CountingSource counting_source_from_string(std::string_view name);

struct TokenUsage {
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  CountingSource counting_source = CountingSource::provider_reported;

  /// Component-wise sum. The result is tagged local_approximation if either side is.
  TokenUsage& operator+=(const TokenUsage& other);
  friend TokenUsage operator+(TokenUsage lhs, const TokenUsage& rhs) { return lhs += rhs; }
  friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
};

struct CompletionOutcome {
  std::string text;
  TokenUsage usage;
  std::string model_id;
  std::string request_fingerprint;

  friend bool operator==(const CompletionOutcome&, const CompletionOutcome&) = default;
};

/// USD per 1,000,000 tokens.
struct PricingTable {
  std::string model_id;
  double input_price = 0.0;
  double output_price = 0.0;
};

/// One PricingTable per model id.
class PricingBook {
 public:
  void add(PricingTable table);
  /// Throws ConfigError naming the model when no entry exists.
  const PricingTable& at(const std::string& model_id) const;
  bool contains(const std::string& model_id) const { return tables_.count(model_id) != 0; }

 private:
  std::map<std::string, PricingTable> tables_;
};

/// Expense of one sample in units of 1e-5 USD.
double compute_expense(const TokenUsage& usage, const PricingTable& pricing);
double compute_expense(const TokenUsage& usage, const std::string& model_id,
                       const PricingBook& book);

/// Local token estimate used when a provider omits usage: each maximal run of
/// non-space, non-punctuation characters counts as one word, and every ASCII
/// punctuation character counts as one standalone mark.
std::int64_t count_tokens_approx(std::string_view text);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

}  // namespace budgetcot
