#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "budgetcot/core.hpp"

namespace budgetcot {

struct Verdict {
  std::optional<std::string> extracted;
  bool correct = false;
  /// "marker", "last_number", "option_marker", "last_option", "full_text" or "none".
  std::string extraction_rule = "none";
};

/// Extracts the final answer from `response_text` and judges it against the gold answer.
Verdict grade(std::string_view response_text, std::string_view gold_answer, AnswerKind kind);

inline Verdict grade(std::string_view response_text, const Question& question) {
  return grade(response_text, question.gold_answer, question.answer_kind);
}

/// Parses "1,234", "$3/2", "-0.50", "12." into a value. nullopt if not a number.
std::optional<long double> parse_numeric(std::string_view token);

/// True when the two values agree within 1e-6 relative tolerance.
bool numeric_equal(long double a, long double b);

}  // namespace budgetcot
