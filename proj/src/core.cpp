#include "budgetcot/core.hpp"

#include <openssl/evp.h>

#include <array>
#include <cctype>

#include <fmt/format.h>

#include "budgetcot/serialize.hpp"

namespace budgetcot {

std::string_view to_string(AnswerKind kind) {
  switch (kind) {
    case AnswerKind::numeric: return "numeric";
    case AnswerKind::multiple_choice: return "multiple_choice";
    case AnswerKind::free_text: return "free_text";
  }
  return "numeric";
}

AnswerKind answer_kind_from_string(std::string_view name) {
  if (name == "numeric") return AnswerKind::numeric;
  if (name == "multiple_choice") return AnswerKind::multiple_choice;
  if (name == "free_text") return AnswerKind::free_text;
  throw DomainError(fmt::format("unknown answer kind '{}'", name));
}

Budget::Budget(std::int64_t tokens) : tokens_(tokens) {
  if (tokens < 1) throw DomainError(fmt::format("budget must be >= 1, got {}", tokens));
}

std::string_view to_string(CountingSource source) {
  return source == CountingSource::provider_reported ? "provider_reported"
                                                     : "local_approximation";
}

CountingSource counting_source_from_string(std::string_view name) {
  if (name == "provider_reported") return CountingSource::provider_reported;
  if (name == "local_approximation") return CountingSource::local_approximation;
  throw DomainError(fmt::format("unknown counting source '{}'", name));
}

TokenUsage& TokenUsage::operator+=(const TokenUsage& other) {
  input_tokens += other.input_tokens;
  output_tokens += other.output_tokens;
  if (other.counting_source == CountingSource::local_approximation)
    counting_source = CountingSource::local_approximation;
  return *this;
}

void PricingBook::add(PricingTable table) {
  if (table.input_price < 0 || table.output_price < 0)
    throw ConfigError(fmt::format("negative price for model '{}'", table.model_id));
  if (tables_.count(table.model_id))
    throw ConfigError(fmt::format("duplicate pricing entry for model '{}'", table.model_id));
  auto key = table.model_id;
  tables_.emplace(std::move(key), std::move(table));
}

const PricingTable& PricingBook::at(const std::string& model_id) const {
  auto it = tables_.find(model_id);
  if (it == tables_.end())
    throw ConfigError(fmt::format("no pricing entry for model '{}'", model_id));
  return it->second;
}

double compute_expense(const TokenUsage& usage, const PricingTable& pricing) {
  // dollars = tokens * price / 1e6; one expense unit is 1e-5 dollars.
  const double micro_dollars = static_cast<double>(usage.input_tokens) * pricing.input_price +
                               static_cast<double>(usage.output_tokens) * pricing.output_price;
  return micro_dollars / 10.0;
}

double compute_expense(const TokenUsage& usage, const std::string& model_id,
                       const PricingBook& book) {
  return compute_expense(usage, book.at(model_id));
}

std::int64_t count_tokens_approx(std::string_view text) {
  std::int64_t count = 0;
  bool in_word = false;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      in_word = false;
    } else if (c < 0x80 && std::ispunct(c)) {
      ++count;
      in_word = false;
    } else if (!in_word) {
      ++count;
      in_word = true;
    }
  }
  return count;
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 digest failed");
  std::string hex;
  hex.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

// ---- serialization --------------------------------------------------------

void to_json(json& j, const Question& q) {
  j = json{{"id", q.id},
           {"text", q.text},
           {"gold_answer", q.gold_answer},
           {"answer_kind", to_string(q.answer_kind)},
           {"source", q.source}};
}

void from_json(const json& j, Question& q) {
  q.id = j.at("id").get<std::string>();
  q.text = j.at("text").get<std::string>();
  q.gold_answer = j.at("gold_answer").get<std::string>();
  q.answer_kind = answer_kind_from_string(j.value("answer_kind", std::string("numeric")));
  q.source = j.value("source", std::string());
}

void to_json(json& j, const TokenUsage& usage) {
  j = json{{"input_tokens", usage.input_tokens},
           {"output_tokens", usage.output_tokens},
           {"counting_source", to_string(usage.counting_source)}};
}

void from_json(const json& j, TokenUsage& usage) {
  usage.input_tokens = j.at("input_tokens").get<std::int64_t>();
  usage.output_tokens = j.at("output_tokens").get<std::int64_t>();
  usage.counting_source = counting_source_from_string(j.at("counting_source").get<std::string>());
}

void to_json(json& j, const CompletionOutcome& outcome) {
  j = json{{"text", outcome.text},
           {"usage", outcome.usage},
           {"model_id", outcome.model_id},
           {"request_fingerprint", outcome.request_fingerprint}};
}

void from_json(const json& j, CompletionOutcome& outcome) {
  outcome.text = j.at("text").get<std::string>();
  outcome.usage = j.at("usage").get<TokenUsage>();
  outcome.model_id = j.at("model_id").get<std::string>();
  outcome.request_fingerprint = j.at("request_fingerprint").get<std::string>();
}

}  // namespace budgetcot
