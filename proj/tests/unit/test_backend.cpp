#include <gtest/gtest.h>

#include <fstream>
#include <thread>

#include "budgetcot/backend.hpp"
#include "budgetcot/errors.hpp"
#include "budgetcot/grading.hpp"
#include "budgetcot/response_cache.hpp"
#include "budgetcot/scripted_backend.hpp"
#include "test_util.hpp"

using namespace budgetcot;
using testutil::reply;

namespace {

ScriptedScript fig1_script() {
  ScriptedBehavior b;
  b.question = testutil::numeric_question("fig1", "How many muffins does Mia keep?", "18");
  b.cost_curve[50] = ScriptedResponse{"24 - 6 leaves 18, so the answer: 18", 86, true};
  b.cost_curve[10] = reply(157);
  b.no_budget = reply(258);
  ScriptedScript s;
  s.behaviors.push_back(std::move(b));
  return s;
}

const SamplingParams kParams{};

}  // namespace

TEST(Scripted, BudgetedPromptHitsCurve) {
  ScriptedBackend backend(fig1_script());
  const auto& q = backend.script().behaviors[0].question;
  const auto out = backend.complete(build_prompt(q, prompt_kind::BudgetedCot{Budget(50)}), kParams);
  EXPECT_EQ(out.usage.output_tokens, 86);
  EXPECT_EQ(out.text, "24 - 6 leaves 18, so the answer: 18");
  EXPECT_EQ(out.model_id, "scripted-mock");
  EXPECT_EQ(backend.complete(build_prompt(q, prompt_kind::BudgetedCot{Budget(10)}), kParams)
                .usage.output_tokens,
            157);
}

TEST(Scripted, VanillaPromptUsesNoBudgetEntry) {
  ScriptedBackend backend(fig1_script());
  const auto& q = backend.script().behaviors[0].question;
  const auto out = backend.complete(build_prompt(q, prompt_kind::VanillaCot{}), kParams);
  EXPECT_EQ(out.usage.output_tokens, 258);
  EXPECT_EQ(out.usage.input_tokens, count_tokens_approx(build_prompt(q, prompt_kind::VanillaCot{}).user));
  EXPECT_TRUE(grade(out.text, q).correct);
}

TEST(Scripted, UnknownBudgetFallsBackToDefault) {
  ScriptedBackend backend(fig1_script());
  const auto& q = backend.script().behaviors[0].question;
  const auto out = backend.complete(build_prompt(q, prompt_kind::BudgetedCot{Budget(33)}), kParams);
  EXPECT_EQ(out.usage.output_tokens, 1);
  EXPECT_FALSE(grade(out.text, q).correct);
}

TEST(Scripted, UnknownQuestionIsProtocolError) {
  ScriptedBackend backend(fig1_script());
  EXPECT_THROW(backend.complete(ChatPrompt{"", "What is the capital of Peru?"}, kParams),
               ProtocolError);
}

TEST(Scripted, FailAfter) {
  ScriptedBackend backend(fig1_script());
  const auto& q = backend.script().behaviors[0].question;
  backend.fail_after(1);
  EXPECT_NO_THROW(backend.complete(build_prompt(q, prompt_kind::VanillaCot{}), kParams));
  EXPECT_THROW(backend.complete(build_prompt(q, prompt_kind::VanillaCot{}), kParams), TransportError);
  backend.fail_after(std::nullopt);
  EXPECT_NO_THROW(backend.complete(build_prompt(q, prompt_kind::VanillaCot{}), kParams));
}

TEST(Scripted, LoadsCohortFixture) {
  const auto script = load_scripted_script(testutil::fixture("cohort.json"));
  ASSERT_EQ(script.behaviors.size(), 4u);
  EXPECT_EQ(script.behaviors[0].cost_curve.at(64).output_tokens, 70);
  EXPECT_EQ(script.behaviors[2].question.answer_kind, AnswerKind::multiple_choice);
}

TEST(Classify, BudgetsFromPrompts) {
  EXPECT_EQ(classify_prompt_budget(ChatPrompt{"", "Q?\nLet's think step by step and use less than 50 tokens:"})
                ->tokens(),
            50);
  EXPECT_EQ(classify_prompt_budget(ChatPrompt{"", "Q?\nLet's think step by step and use less than 10 tokens:"})
                ->tokens(),
            10);
  EXPECT_FALSE(classify_prompt_budget(ChatPrompt{"", "Q?\nLet's think step by step:"}));
}

TEST(Fingerprint, CoversEveryRequestField) {
  const ChatPrompt p{"", "hello"};
  const auto base = request_fingerprint("m", p, kParams);
  EXPECT_EQ(base, request_fingerprint("m", p, kParams));
  EXPECT_NE(base, request_fingerprint("m2", p, kParams));
  EXPECT_NE(base, request_fingerprint("m", ChatPrompt{"s", "hello"}, kParams));
  EXPECT_NE(base, request_fingerprint("m", ChatPrompt{"", "hello!"}, kParams));
  EXPECT_NE(base, request_fingerprint("m", p, SamplingParams{0.2, 1024, 1}));
  EXPECT_NE(base, request_fingerprint("m", p, SamplingParams{0.1, 1025, 1}));
  EXPECT_NE(base, request_fingerprint("m", p, SamplingParams{0.1, 1024, 2}));
  EXPECT_EQ(base.size(), 64u);
}

TEST(Cache, SecondRequestServedFromCache) {
  testutil::TempDir dir("cache");
  ScriptedBackend upstream(fig1_script());
  ResponseCache cache(dir / "cache.jsonl");
  CachingBackend backend(upstream, cache);
  const auto prompt = build_prompt(upstream.script().behaviors[0].question, prompt_kind::VanillaCot{});

  const auto first = backend.complete(prompt, kParams);
  const auto second = backend.complete(prompt, kParams);
  EXPECT_EQ(first, second);
  EXPECT_EQ(upstream.calls(), 1u);
  EXPECT_EQ(first.request_fingerprint, request_fingerprint("scripted-mock", prompt, kParams));
  EXPECT_EQ(json(first).dump(), json(second).dump());
}

TEST(Cache, ReloadFromDisk) {
  testutil::TempDir dir("cache-reload");
  ScriptedBackend upstream(fig1_script());
  const auto prompt = build_prompt(upstream.script().behaviors[0].question, prompt_kind::VanillaCot{});
  CompletionOutcome first;
  {
    ResponseCache cache(dir / "cache.jsonl");
    CachingBackend backend(upstream, cache);
    first = backend.complete(prompt, kParams);
  }
  ResponseCache cache(dir / "cache.jsonl");
  EXPECT_EQ(cache.size(), 1u);
  CachingBackend backend(upstream, cache);
  EXPECT_EQ(backend.complete(prompt, kParams), first);
  EXPECT_EQ(upstream.calls(), 1u);
}

TEST(Cache, TornTailIsIgnored) {
  testutil::TempDir dir("cache-torn");
  ScriptedBackend upstream(fig1_script());
  const auto& q = upstream.script().behaviors[0].question;
  {
    ResponseCache cache(dir / "cache.jsonl");
    CachingBackend backend(upstream, cache);
    backend.complete(build_prompt(q, prompt_kind::VanillaCot{}), kParams);
  }
  {
    std::ofstream out(dir / "cache.jsonl", std::ios::app);
    out << R"({"fingerprint":"abc","outc)";
  }
  ResponseCache cache(dir / "cache.jsonl");
  EXPECT_EQ(cache.size(), 1u);
  CachingBackend backend(upstream, cache);
  backend.complete(build_prompt(q, prompt_kind::BudgetedCot{Budget(50)}), kParams);
  EXPECT_EQ(ResponseCache(dir / "cache.jsonl").size(), 2u);
}

TEST(Cache, ConcurrentIdenticalRequestsShareOneUpstreamCall) {
  testutil::TempDir dir("cache-conc");
  ScriptedBackend upstream(fig1_script());
  ResponseCache cache(dir / "cache.jsonl");
  CachingBackend backend(upstream, cache);
  const auto prompt = build_prompt(upstream.script().behaviors[0].question, prompt_kind::VanillaCot{});
  std::vector<CompletionOutcome> outs(8);
  {
    std::vector<std::jthread> threads;
    for (std::size_t i = 0; i < outs.size(); ++i)
      threads.emplace_back([&, i] { outs[i] = backend.complete(prompt, kParams); });
  }
  EXPECT_EQ(upstream.calls(), 1u);
  for (const auto& o : outs) EXPECT_EQ(o, outs[0]);
}

TEST(Cache, UpstreamErrorsAreNotCached) {
  testutil::TempDir dir("cache-err");
  ScriptedBackend upstream(fig1_script());
  ResponseCache cache(dir / "cache.jsonl");
  CachingBackend backend(upstream, cache);
  const auto prompt = build_prompt(upstream.script().behaviors[0].question, prompt_kind::VanillaCot{});
  upstream.fail_after(0);
  EXPECT_THROW(backend.complete(prompt, kParams), TransportError);
  EXPECT_EQ(cache.size(), 0u);
  upstream.fail_after(std::nullopt);
  EXPECT_EQ(backend.complete(prompt, kParams).usage.output_tokens, 258);
}
