#include "budgetcot/grading.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>

#include <fmt/format.h>

namespace budgetcot {

namespace {

// Thousands groups must be complete ("1,2345" is two numbers); "18." keeps the period as prose.
const std::regex& number_pattern() {
  static const std::regex re(
      R"(-?\$?(?:\d{1,3}(?:,\d{3})+(?!\d)|\d+)(?:\.\d+)?(?:/\d+(?:\.\d+)?)?)");
  return re;
}

const std::regex& numeric_marker_pattern() {
  static const std::regex re(R"(answer\s*(?:is|:)|####|\\boxed\{)", std::regex::icase);
  return re;
}

const std::regex& option_marker_pattern() {
  static const std::regex re(
      R"((?:[Aa]nswer|[Oo]ption|[Cc]hoice)(?:\s+is)?\s*:?\s*[\(\[]?\s*([A-E])\b)");
  return re;
}

const std::regex& standalone_option_pattern() {
  static const std::regex re(R"(\b([A-E])\b)");
  return re;
}

const std::regex& text_marker_pattern() {
  static const std::regex re(R"(answer\s*(?:is\s*:?|:)\s*)", std::regex::icase);
  return re;
}

std::string_view rest_of_line(std::string_view text, std::size_t from) {
  auto tail = text.substr(from);
  const auto eol = tail.find('\n');
  return eol == std::string_view::npos ? tail : tail.substr(0, eol);
}

std::optional<std::string> first_number(std::string_view text) {
  std::match_results<std::string_view::const_iterator> m;
  if (std::regex_search(text.begin(), text.end(), m, number_pattern())) return m.str(0);
  return std::nullopt;
}

std::optional<std::string> last_number(std::string_view text) {
  std::optional<std::string> last;
  using It = std::regex_iterator<std::string_view::const_iterator>;
  for (It it(text.begin(), text.end(), number_pattern()), end; it != end; ++it) last = it->str(0);
  return last;
}

std::string format_number(long double value) {
  return fmt::format("{}", static_cast<double>(value));
}

std::string normalize_text(std::string_view text) {
  std::string out;
  bool space = false;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(c));
  }
  while (!out.empty() && (out.back() == '.' || out.back() == ' ')) out.pop_back();
  return out;
}

std::optional<char> option_letter(std::string_view text) {
  std::optional<char> letter;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalpha(c)) {
      if (letter) return std::nullopt;
      letter = static_cast<char>(std::toupper(c));
    }
  }
  if (letter && *letter >= 'A' && *letter <= 'E') return letter;
  return std::nullopt;
}

Verdict grade_numeric(std::string_view response, std::string_view gold) {
  Verdict verdict;
  std::optional<std::string> raw;

  using It = std::regex_iterator<std::string_view::const_iterator>;
  for (It it(response.begin(), response.end(), numeric_marker_pattern()), end; it != end; ++it) {
    const auto after = static_cast<std::size_t>(it->position(0) + it->length(0));
    if (auto n = first_number(rest_of_line(response, after))) raw = std::move(n);
  }
  if (raw) {
    verdict.extraction_rule = "marker";
  } else if ((raw = last_number(response))) {
    verdict.extraction_rule = "last_number";
  } else {
    return verdict;
  }

  const auto value = parse_numeric(*raw);
  if (!value) {
    verdict.extraction_rule = "none";
    return verdict;
  }
  verdict.extracted = format_number(*value);

  auto gold_value = parse_numeric(gold);
  if (!gold_value) {
    if (auto n = last_number(gold)) gold_value = parse_numeric(*n);
  }
  verdict.correct = gold_value && numeric_equal(*value, *gold_value);
  return verdict;
}

Verdict grade_choice(std::string_view response, std::string_view gold) {
  Verdict verdict;
  using It = std::regex_iterator<std::string_view::const_iterator>;
  std::optional<std::string> letter;
  for (It it(response.begin(), response.end(), option_marker_pattern()), end; it != end; ++it)
    letter = it->str(1);
  if (letter) {
    verdict.extraction_rule = "option_marker";
  } else {
    for (It it(response.begin(), response.end(), standalone_option_pattern()), end; it != end;
         ++it)
      letter = it->str(1);
    if (!letter) return verdict;
    verdict.extraction_rule = "last_option";
  }
  verdict.extracted = letter;
  const auto gold_letter = option_letter(gold);
  verdict.correct = gold_letter && (*letter)[0] == *gold_letter;
  return verdict;
}

Verdict grade_free_text(std::string_view response, std::string_view gold) {
  Verdict verdict;
  std::string_view candidate = response;
  verdict.extraction_rule = "full_text";

  using It = std::regex_iterator<std::string_view::const_iterator>;
  std::optional<std::size_t> after;
  for (It it(response.begin(), response.end(), text_marker_pattern()), end; it != end; ++it)
    after = static_cast<std::size_t>(it->position(0) + it->length(0));
  if (after) {
    candidate = rest_of_line(response, *after);
    verdict.extraction_rule = "marker";
  }
  auto normalized = normalize_text(candidate);
  if (normalized.empty()) {
    verdict.extraction_rule = "none";
    return verdict;
  }
  verdict.correct = normalized == normalize_text(gold);
  verdict.extracted = std::move(normalized);
  return verdict;
}

}  // namespace

std::optional<long double> parse_numeric(std::string_view token) {
  std::string cleaned;
  for (char ch : token) {
    if (ch == ',' || ch == '$' || std::isspace(static_cast<unsigned char>(ch))) continue;
    cleaned += ch;
  }
  if (cleaned.empty()) return std::nullopt;

  auto parse_plain = [](const std::string& s) -> std::optional<long double> {
    static const std::regex plain(R"(-?\d+(?:\.\d+)?|-?\d*\.\d+|-?\d+\.)");
    if (!std::regex_match(s, plain)) return std::nullopt;
    return std::stold(s);
  };

  const auto slash = cleaned.find('/');
  if (slash == std::string::npos) return parse_plain(cleaned);
  const auto num = parse_plain(cleaned.substr(0, slash));
  const auto den = parse_plain(cleaned.substr(slash + 1));
  if (!num || !den || *den == 0.0L) return std::nullopt;
  return *num / *den;
}

bool numeric_equal(long double a, long double b) {
  if (a == b) return true;
  const long double scale = std::max(std::fabs(a), std::fabs(b));
  return std::fabs(a - b) <= 1e-6L * scale;
}

Verdict grade(std::string_view response_text, std::string_view gold_answer, AnswerKind kind) {
  switch (kind) {
    case AnswerKind::numeric: return grade_numeric(response_text, gold_answer);
    case AnswerKind::multiple_choice: return grade_choice(response_text, gold_answer);
    case AnswerKind::free_text: return grade_free_text(response_text, gold_answer);
  }
  return {};
}

}  // namespace budgetcot
