#include "budgetcot/elasticity.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

#include <fmt/format.h>

namespace budgetcot {

Budget IdealRange::min_budget() const {
  if (window_budgets.empty()) throw DomainError("empty ideal range");
  return *std::min_element(window_budgets.begin(), window_budgets.end());
}

Budget IdealRange::max_budget() const {
  if (window_budgets.empty()) throw DomainError("empty ideal range");
  return *std::max_element(window_budgets.begin(), window_budgets.end());
}

std::size_t auto_window_size(std::size_t n) { return std::max<std::size_t>(1, n / 3); }

IdealRange ideal_budget_range(std::span<const CostPoint> points, std::optional<std::size_t> k) {
  if (points.empty()) throw DomainError("ideal budget range of an empty trace");
  const std::size_t n = points.size();
  const std::size_t size = k.value_or(auto_window_size(n));
  if (size < 1 || size > n)
    throw DomainError(fmt::format("window size {} outside [1, {}]", size, n));

  std::int64_t sum = 0;
  for (std::size_t i = 0; i < size; ++i) sum += points[i].cost;
  std::int64_t best = sum;
  std::size_t best_start = 0;
  for (std::size_t start = 1; start + size <= n; ++start) {
    sum += points[start + size - 1].cost - points[start - 1].cost;
    if (sum < best) {
      best = sum;
      best_start = start;
    }
  }

  IdealRange range;
  range.window_size = size;
  range.total_cost = best;
  range.start_index = best_start;
  for (std::size_t i = best_start; i < best_start + size; ++i)
    range.window_budgets.push_back(points[i].budget);
  return range;
}

IdealRange ideal_budget_range(const ElasticityTrace& trace, std::optional<std::size_t> k) {
  std::vector<CostPoint> correct;
  for (const auto& p : trace.points)
    if (p.correct) correct.push_back(CostPoint{p.budget, p.observed_cost});
  return ideal_budget_range(correct, k);
}

bool in_ideal_range(Budget estimate, const IdealRange& range) {
  return range.min_budget() <= estimate && estimate <= range.max_budget();
}

std::int64_t distance_to_range(Budget estimate, const IdealRange& range) {
  if (in_ideal_range(estimate, range)) return 0;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (const auto b : range.window_budgets)
    best = std::min<std::int64_t>(best, std::llabs(estimate.tokens() - b.tokens()));
  return best;
}

EstimatorQuality estimator_quality(std::span<const EstimatorSample> samples) {
  if (samples.empty()) throw DomainError("estimator quality of an empty sample list");
  EstimatorQuality q;
  q.samples = samples.size();
  std::int64_t distance_sum = 0;
  for (const auto& s : samples) {
    if (in_ideal_range(s.estimate, s.range)) {
      ++q.in_range;
    } else {
      distance_sum += distance_to_range(s.estimate, s.range);
    }
  }
  q.in_range_accuracy = static_cast<double>(q.in_range) / static_cast<double>(q.samples);
  const auto outside = q.samples - q.in_range;
  if (outside > 0)
    q.out_of_range_distance = static_cast<double>(distance_sum) / static_cast<double>(outside);
  return q;
}

void to_json(json& j, const IdealRange& range) {
  json budgets = json::array();
  for (const auto b : range.window_budgets) budgets.push_back(b.tokens());
  j = json{{"window_budgets", std::move(budgets)},
           {"window_size", range.window_size},
           {"total_cost", range.total_cost},
           {"start_index", range.start_index}};
}

}  // namespace budgetcot
