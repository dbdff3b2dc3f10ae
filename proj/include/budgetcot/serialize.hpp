#pragma once

// nlohmann::json conversions for the core value types.

#include <json.hpp>

#include "budgetcot/core.hpp"

namespace budgetcot {

using json = nlohmann::json;

void to_json(json& j, const Question& q);
void from_json(const json& j, Question& q);

void to_json(json& j, const TokenUsage& usage);
void from_json(const json& j, TokenUsage& usage);

void to_json(json& j, const CompletionOutcome& outcome);
void from_json(const json& j, CompletionOutcome& outcome);

}  // namespace budgetcot
