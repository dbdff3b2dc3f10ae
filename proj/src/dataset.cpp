#include "budgetcot/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "budgetcot/grading.hpp"
#include "budgetcot/scripted_backend.hpp"
#include "budgetcot/serialize.hpp"

namespace budgetcot {

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError(fmt::format("cannot open dataset {}", path.string()), 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string id_or(const json& item, std::string fallback) {
  if (auto it = item.find("id"); it != item.end()) {
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
  }
  return fallback;
}

Question gsm8k_question(const json& item, std::size_t index, const std::string& source,
                        std::size_t line) {
  if (!item.is_object() || !item.contains("question") || !item.contains("answer"))
    throw DatasetError("gsm8k record needs \"question\" and \"answer\"", line);
  Question q;
  q.id = id_or(item, fmt::format("{}-{}", source, index));
  q.text = item.at("question").get<std::string>();
  const auto answer = item.at("answer").get<std::string>();
  auto gold = gsm8k_gold_answer(answer);
  if (!gold) gold = trim(answer);
  if (gold->empty()) throw DatasetError("missing gold answer", line);
  q.gold_answer = *gold;
  q.answer_kind = AnswerKind::numeric;
  q.source = source;
  return q;
}

// MathBench items: {"question", "options": [...], "answer": "B"}.
Question mathbench_question(const json& item, std::size_t index, const std::string& source,
                            std::size_t line) {
  if (!item.is_object() || !item.contains("question") || !item.contains("answer"))
    throw DatasetError("mathbench item needs \"question\" and \"answer\"", line);
  Question q;
  q.id = id_or(item, fmt::format("{}-{}", source, index));
  q.text = item.at("question").get<std::string>();
  bool has_options = false;
  if (auto options = item.find("options"); options != item.end() && options->is_array()) {
    has_options = true;
    char letter = 'A';
    for (const auto& option : *options)
      q.text += fmt::format("\n{}. {}", letter++, option.get<std::string>());
  }
  q.gold_answer = trim(item.at("answer").get<std::string>());
  if (q.gold_answer.empty()) throw DatasetError("missing gold answer", line);
  const bool letter = q.gold_answer.size() == 1 && q.gold_answer[0] >= 'A' && q.gold_answer[0] <= 'E';
  if (has_options || letter) {
    q.answer_kind = AnswerKind::multiple_choice;
  } else {
    q.answer_kind = parse_numeric(q.gold_answer) ? AnswerKind::numeric : AnswerKind::free_text;
  }
  q.source = source;
  return q;
}

template <class Make>
std::vector<Question> parse_lines(const std::string& content, const std::string& source,
                                  Make&& make) {
  std::vector<Question> out;
  std::istringstream in(content);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    json item;
    try {
      item = json::parse(line);
    } catch (const json::exception& e) {
      throw DatasetError(fmt::format("malformed JSON: {}", e.what()), number);
    }
    try {
      out.push_back(make(item, out.size(), source, number));
    } catch (const json::exception& e) {
      throw DatasetError(fmt::format("bad record: {}", e.what()), number);
    }
  }
  return out;
}

// Unbiased draw from [0, bound) on raw engine output; std distributions are
// implementation-defined and would break cross-platform reproducibility.
std::uint64_t draw_below(std::mt19937_64& engine, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

std::string_view to_string(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::gsm8k_jsonl: return "gsm8k_jsonl";
    case DatasetFormat::mathbench_json: return "mathbench_json";
    case DatasetFormat::scripted_json: return "scripted_json";
  }
  return "gsm8k_jsonl";
}

DatasetFormat dataset_format_from_string(std::string_view name) {
  if (name == "gsm8k_jsonl" || name == "gsm8k") return DatasetFormat::gsm8k_jsonl;
  if (name == "mathbench_json" || name == "mathbench") return DatasetFormat::mathbench_json;
  if (name == "scripted_json" || name == "scripted") return DatasetFormat::scripted_json;
  throw DomainError(fmt::format(
      "unknown dataset format '{}' (expected gsm8k_jsonl|mathbench_json|scripted_json)", name));
}

std::optional<std::string> gsm8k_gold_answer(std::string_view answer_field) {
  const auto pos = answer_field.rfind("####");
  if (pos == std::string_view::npos) return std::nullopt;
  auto gold = trim(answer_field.substr(pos + 4));
  gold.erase(std::remove(gold.begin(), gold.end(), ','), gold.end());
  if (gold.empty()) return std::nullopt;
  return gold;
}

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format, std::string name) {
  Dataset ds;
  ds.name = name.empty() ? path.stem().string() : std::move(name);
  const auto content = read_file(path);

  switch (format) {
    case DatasetFormat::gsm8k_jsonl:
      ds.questions = parse_lines(content, ds.name, gsm8k_question);
      break;
    case DatasetFormat::mathbench_json: {
      const auto first = content.find_first_not_of(" \t\r\n");
      if (first != std::string::npos && content[first] == '[') {
        json items;
        try {
          items = json::parse(content);
        } catch (const json::exception& e) {
          throw DatasetError(fmt::format("malformed JSON: {}", e.what()), 0);
        }
        for (std::size_t i = 0; i < items.size(); ++i) {
          try {
            ds.questions.push_back(mathbench_question(items[i], i, ds.name, 0));
          } catch (const json::exception& e) {
            throw DatasetError(fmt::format("bad item {}: {}", i, e.what()), 0);
          } catch (const DatasetError& e) {
            throw DatasetError(fmt::format("item {}: {}", i, e.what()), 0);
          }
        }
      } else {
        ds.questions = parse_lines(content, ds.name, mathbench_question);
      }
      break;
    }
    case DatasetFormat::scripted_json: {
      try {
        const auto script = json::parse(content).get<ScriptedScript>();
        for (const auto& b : script.behaviors) ds.questions.push_back(b.question);
      } catch (const json::exception& e) {
        throw DatasetError(fmt::format("malformed scripted dataset: {}", e.what()), 0);
      }
      for (auto& q : ds.questions) {
        if (q.source.empty()) q.source = ds.name;
        if (q.answer_kind != AnswerKind::free_text && q.gold_answer.empty())
          throw DatasetError(fmt::format("question '{}' has no gold answer", q.id), 0);
      }
      break;
    }
  }

  std::set<std::string> ids;
  for (const auto& q : ds.questions)
    if (!ids.insert(q.id).second)
      throw DatasetError(fmt::format("duplicate question id '{}'", q.id), 0);
  return ds;
}

Dataset sample_dataset(const Dataset& dataset, std::size_t n, std::uint64_t seed) {
  const auto size = dataset.questions.size();
  if (n > size)
    throw DomainError(fmt::format("cannot sample {} questions from {}", n, size));

  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 engine(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(draw_below(engine, size - i));
    std::swap(order[i], order[j]);
  }
  order.resize(n);
  std::sort(order.begin(), order.end());

  Dataset out;
  out.name = dataset.name;
  for (auto i : order) out.questions.push_back(dataset.questions[i]);
  out.sampling = SamplingInfo{seed, n, size};
  return out;
}

}  // namespace budgetcot
