#include "budgetcot/backend.hpp"

#include <charconv>
#include <limits>
#include <regex>

#include "budgetcot/serialize.hpp"

namespace budgetcot {

namespace {

std::string regex_escape(std::string_view text) {
  static constexpr std::string_view special = R"(\^$.|?*+()[]{}/)";
  std::string out;
  for (char ch : text) {
    if (special.find(ch) != std::string_view::npos) out += '\\';
    out += ch;
  }
  return out;
}

std::optional<Budget> to_budget(const std::string& digits) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || value < 1) return std::nullopt;
  return Budget(value);
}

}  // namespace

std::string request_fingerprint(const std::string& model_id, const ChatPrompt& prompt,
                                const SamplingParams& params) {
  const json key = {{"model", model_id},
                    {"system", prompt.system},
                    {"user", prompt.user},
                    {"temperature", params.temperature},
                    {"seed", params.seed},
                    {"max_candidates", params.max_candidates}};
  return sha256_hex(key.dump());
}

std::optional<Budget> classify_prompt_budget(const ChatPrompt& prompt,
                                             const PromptTemplates& templates) {
  const std::string& text = prompt.user;
  std::smatch m;

  const auto pos = templates.budgeted_cot.find("{budget}");
  if (pos != std::string::npos) {
    const std::regex configured(regex_escape(templates.budgeted_cot.substr(0, pos)) + "(\\d+)" +
                                regex_escape(templates.budgeted_cot.substr(pos + 8)));
    if (std::regex_search(text, m, configured)) return to_budget(m.str(1));
  }

  static const std::regex generic(R"(use less than (\d+) tokens)");
  if (std::regex_search(text, m, generic)) return to_budget(m.str(1));
  return std::nullopt;
}

}  // namespace budgetcot
