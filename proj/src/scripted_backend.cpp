#include "budgetcot/scripted_backend.hpp"

#include <fstream>

#include <fmt/format.h>

#include "budgetcot/grading.hpp"

namespace budgetcot {

void to_json(json& j, const ScriptedResponse& r) {
  j = json{{"output_tokens", r.output_tokens}, {"correct", r.correct}};
  if (r.text) j["text"] = *r.text;
}

void from_json(const json& j, ScriptedResponse& r) {
  r.text = j.contains("text") ? std::optional(j.at("text").get<std::string>()) : std::nullopt;
  if (j.contains("output_tokens")) {
    r.output_tokens = j.at("output_tokens").get<std::int64_t>();
  } else if (r.text) {
    r.output_tokens = count_tokens_approx(*r.text);
  } else {
    throw DomainError("scripted response needs output_tokens or text");
  }
  if (r.output_tokens < 0) throw DomainError("scripted output_tokens must be >= 0");
  r.correct = j.value("correct", true);
}

void to_json(json& j, const ScriptedBehavior& b) {
  j = b.question;
  json curve = json::object();
  for (const auto& [budget, response] : b.cost_curve) curve[std::to_string(budget)] = response;
  j["cost_curve"] = std::move(curve);
  if (b.no_budget) j["no_budget"] = *b.no_budget;
  if (b.direct) j["direct"] = *b.direct;
  if (b.estimation) j["estimation"] = *b.estimation;
  j["default"] = b.default_response;
}

void from_json(const json& j, ScriptedBehavior& b) {
  b.question = j.get<Question>();
  b.cost_curve.clear();
  if (j.contains("cost_curve")) {
    for (const auto& [key, value] : j.at("cost_curve").items()) {
      const auto budget = std::stoll(key);
      if (budget < 1) throw DomainError(fmt::format("cost_curve key {} is not a budget", key));
      b.cost_curve.emplace(budget, value.get<ScriptedResponse>());
    }
  }
  auto optional_entry = [&](const char* name) -> std::optional<ScriptedResponse> {
    if (!j.contains(name)) return std::nullopt;
    return j.at(name).get<ScriptedResponse>();
  };
  b.no_budget = optional_entry("no_budget");
  b.direct = optional_entry("direct");
  b.estimation = optional_entry("estimation");
  if (auto fallback = optional_entry("default")) b.default_response = *fallback;
}

void to_json(json& j, const ScriptedScript& s) {
  j = json{{"model_id", s.model_id}, {"questions", s.behaviors}};
}

void from_json(const json& j, ScriptedScript& s) {
  s.model_id = j.value("model_id", std::string("scripted-mock"));
  s.behaviors = j.at("questions").get<std::vector<ScriptedBehavior>>();
}

ScriptedScript load_scripted_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open scripted behavior file {}", path.string()));
  try {
    return json::parse(in).get<ScriptedScript>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("invalid scripted behavior file {}: {}", path.string(), e.what()));
  }
}

std::string synthesize_response(const Question& question, bool correct) {
  std::string answer = question.gold_answer;
  if (!correct) {
    switch (question.answer_kind) {
      case AnswerKind::numeric: {
        const auto gold = parse_numeric(question.gold_answer);
        answer = gold ? fmt::format("{}", static_cast<double>(*gold + 1)) : "unknown";
        break;
      }
      case AnswerKind::multiple_choice:
        answer = (!answer.empty() && answer.front() == 'A') ? "B" : "A";
        break;
      case AnswerKind::free_text:
        answer = "unknown";
        break;
    }
  }
  return fmt::format("Working through the problem. The answer is {}.", answer);
}

ScriptedBackend::ScriptedBackend(ScriptedScript script, PromptTemplates templates)
    : script_(std::move(script)), templates_(std::move(templates)) {}

const ScriptedBehavior& ScriptedBackend::route(const ChatPrompt& prompt) const {
  const ScriptedBehavior* best = nullptr;
  for (const auto& behavior : script_.behaviors) {
    const auto& text = behavior.question.text;
    if (text.empty() || prompt.user.find(text) == std::string::npos) continue;
    if (!best || text.size() > best->question.text.size()) best = &behavior;
  }
  if (!best) throw ProtocolError("no scripted question matches the prompt", prompt.user);
  return *best;
}

const ScriptedResponse& ScriptedBackend::select(const ScriptedBehavior& behavior,
                                                const ChatPrompt& prompt) const {
  const auto& user = prompt.user;
  if (user.find(templates_.estimation_task) != std::string::npos)
    return behavior.estimation ? *behavior.estimation : behavior.default_response;
  if (auto budget = classify_prompt_budget(prompt, templates_)) {
    auto it = behavior.cost_curve.find(budget->tokens());
    return it != behavior.cost_curve.end() ? it->second : behavior.default_response;
  }
  if (user.find(templates_.vanilla_cot) != std::string::npos)
    return behavior.no_budget ? *behavior.no_budget : behavior.default_response;
  if (user.find(templates_.direct_answer) != std::string::npos)
    return behavior.direct ? *behavior.direct : behavior.default_response;
  return behavior.default_response;
}

CompletionOutcome ScriptedBackend::complete(const ChatPrompt& prompt,
                                            const SamplingParams& params) {
  const auto fingerprint = request_fingerprint(script_.model_id, prompt, params);
  {
    std::lock_guard lock(mutex_);
    if (remaining_before_failure_) {
      if (*remaining_before_failure_ == 0)
        throw TransportError("scripted backend: injected transport failure");
      --*remaining_before_failure_;
    }
    ++by_fingerprint_[fingerprint];
  }
  calls_.fetch_add(1);

  const auto& behavior = route(prompt);
  const auto& response = select(behavior, prompt);

  CompletionOutcome outcome;
  outcome.text = response.text ? *response.text : synthesize_response(behavior.question,
                                                                      response.correct);
  outcome.usage.input_tokens = count_tokens_approx(prompt.system) + count_tokens_approx(prompt.user);
  outcome.usage.output_tokens = response.output_tokens;
  outcome.usage.counting_source = CountingSource::provider_reported;
  outcome.model_id = script_.model_id;
  outcome.request_fingerprint = fingerprint;
  return outcome;
}

std::map<std::string, std::size_t> ScriptedBackend::calls_by_fingerprint() const {
  std::lock_guard lock(mutex_);
  return by_fingerprint_;
}

void ScriptedBackend::fail_after(std::optional<std::size_t> n) {
  std::lock_guard lock(mutex_);
  remaining_before_failure_ = n;
}

}  // namespace budgetcot
