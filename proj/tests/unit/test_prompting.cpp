#include <gtest/gtest.h>

#include <set>

#include "budgetcot/backend.hpp"
#include "budgetcot/errors.hpp"
#include "budgetcot/prompting.hpp"
#include "test_util.hpp"

using namespace budgetcot;

namespace {

const Question kQuestion =
    testutil::numeric_question("q", "Tom has 3 apples and buys 15 more. How many now?", "18");

std::string suffix_line(const ChatPrompt& p) { return p.user.substr(p.user.rfind('\n') + 1); }

}  // namespace

TEST(Templates, VerbatimInstructions) {
  EXPECT_EQ(kVanillaCotInstruction, "Let's think step by step:");
  EXPECT_EQ(kBudgetedCotInstruction, "Let's think step by step and use less than {budget} tokens:");
  EXPECT_EQ(render_budget_instruction(Budget(50)),
            "Let's think step by step and use less than 50 tokens:");
  EXPECT_EQ(kEstimationTaskLine,
            "Task: Analyze the given question and estimate the minimum number of tokens "
            "required for reasoning.");
}

TEST(BuildPrompt, Suffixes) {
  EXPECT_EQ(suffix_line(build_prompt(kQuestion, prompt_kind::BudgetedCot{Budget(50)})),
            "Let's think step by step and use less than 50 tokens:");
  EXPECT_EQ(suffix_line(build_prompt(kQuestion, prompt_kind::VanillaCot{})),
            "Let's think step by step:");
  EXPECT_EQ(suffix_line(build_prompt(kQuestion, prompt_kind::BudgetedCot{Budget(10)})),
            "Let's think step by step and use less than 10 tokens:");
}

TEST(BuildPrompt, ExactBytes) {
  const auto p = build_prompt(kQuestion, prompt_kind::BudgetedCot{Budget(50)});
  EXPECT_EQ(p.system, "");
  EXPECT_EQ(p.user,
            "Tom has 3 apples and buys 15 more. How many now?\n"
            "Let's think step by step and use less than 50 tokens:");
  EXPECT_EQ(build_prompt(kQuestion, prompt_kind::DirectAnswer{}).user,
            "Tom has 3 apples and buys 15 more. How many now?\n"
            "Answer the question directly without any reasoning process.");
}

TEST(BuildPrompt, MultipleChoiceGetsFormatInstruction) {
  Question mc{"m", "Which is prime?\nA. 21\nB. 23", "B", AnswerKind::multiple_choice, ""};
  const auto p = build_prompt(mc, prompt_kind::VanillaCot{});
  EXPECT_EQ(p.user, "Which is prime?\nA. 21\nB. 23\n" + std::string(kFormatInstruction) +
                        "\nLet's think step by step:");
  EXPECT_EQ(build_prompt(kQuestion, prompt_kind::FormatInstruction{}).user.find(kFormatInstruction),
            kQuestion.text.size() + 1);
}

TEST(BuildPrompt, DistinctKindsGiveDistinctPrompts) {
  std::set<std::string> seen;
  seen.insert(build_prompt(kQuestion, prompt_kind::DirectAnswer{}).user);
  seen.insert(build_prompt(kQuestion, prompt_kind::VanillaCot{}).user);
  seen.insert(build_prompt(kQuestion, prompt_kind::BudgetEstimation{}).user);
  seen.insert(build_prompt(kQuestion, prompt_kind::FormatInstruction{}).user);
  for (std::int64_t b = 1; b <= 300; ++b)
    seen.insert(build_prompt(kQuestion, prompt_kind::BudgetedCot{Budget(b)}).user);
  EXPECT_EQ(seen.size(), 304u);
}

TEST(BuildPrompt, BudgetRoundTripsThroughClassifier) {
  for (std::int64_t b : {1, 2, 9, 10, 50, 64, 999, 4096, 123456789}) {
    const auto p = build_prompt(kQuestion, prompt_kind::BudgetedCot{Budget(b)});
    ASSERT_TRUE(classify_prompt_budget(p).has_value());
    EXPECT_EQ(classify_prompt_budget(p)->tokens(), b);
  }
  EXPECT_FALSE(classify_prompt_budget(build_prompt(kQuestion, prompt_kind::VanillaCot{})));
}

TEST(EstimationPrompt, ContainsTaskLineAndQuestion) {
  const auto p = build_estimation_prompt(kQuestion);
  EXPECT_NE(p.user.find(kEstimationTaskLine), std::string::npos);
  EXPECT_NE(p.user.find(kQuestion.text), std::string::npos);
  EXPECT_EQ(p.user, build_prompt(kQuestion, prompt_kind::BudgetEstimation{}).user);
}

TEST(EstimationPrompt, DiffersOnlyInQuestionBody) {
  const auto a = build_estimation_prompt(testutil::numeric_question("a", "AAA", "1")).user;
  const auto b = build_estimation_prompt(testutil::numeric_question("b", "BBBB", "1")).user;
  const auto pa = a.find("AAA");
  const auto pb = b.find("BBBB");
  EXPECT_EQ(pa, pb);
  EXPECT_EQ(a.substr(0, pa), b.substr(0, pb));
  EXPECT_EQ(a.substr(pa + 3), b.substr(pb + 4));
}

TEST(EstimationPrompt, EmptyQuestionKeepsScaffolding) {
  const auto p = build_estimation_prompt(testutil::numeric_question("e", "", "1"));
  EXPECT_EQ(p.user, std::string(kEstimationTaskLine) + "\nQuestion: \n" +
                        std::string(kEstimationOutputContract));
}

TEST(TemplatesConfig, BudgetPlaceholderRequired) {
  PromptTemplates t;
  t.budgeted_cot = "no placeholder";
  EXPECT_THROW(t.validate(), ConfigError);
  t.budgeted_cot = "{budget} {budget}";
  EXPECT_THROW(t.validate(), ConfigError);
  t.budgeted_cot = "Be brief, at most {budget} tokens.";
  EXPECT_NO_THROW(t.validate());
  EXPECT_EQ(render_budget_instruction(Budget(7), t), "Be brief, at most 7 tokens.");
  const auto p = build_prompt(kQuestion, prompt_kind::BudgetedCot{Budget(7)}, t);
  EXPECT_EQ(classify_prompt_budget(p, t)->tokens(), 7);
}
