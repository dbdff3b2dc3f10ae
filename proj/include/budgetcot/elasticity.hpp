#pragma once

// Token-elasticity analysis: the ideal budget range (the contiguous window of
// correctness-preserving budgets with the lowest total observed cost) and the
// quality of estimated budgets measured against it.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "budgetcot/core.hpp"
#include "budgetcot/search.hpp"

namespace budgetcot {

struct CostPoint {
  Budget budget;
  std::int64_t cost = 0;
};

struct IdealRange {
  std::vector<Budget> window_budgets;
  std::size_t window_size = 0;
  std::int64_t total_cost = 0;
  /// Index of the first window point within the analysed points.
  std::size_t start_index = 0;

  Budget min_budget() const;
  Budget max_budget() const;
};

/// max(1, floor(n / 3)).
std::size_t auto_window_size(std::size_t n);

/// Minimum-sum contiguous window of size k (auto when nullopt); ties go to the
/// smallest start index. Throws DomainError on empty input or k outside [1, n].
IdealRange ideal_budget_range(std::span<const CostPoint> points, std::optional<std::size_t> k);

/// Same, over the correct points of a trace, in trace order.
IdealRange ideal_budget_range(const ElasticityTrace& trace, std::optional<std::size_t> k);

/// A budget is in range when it lies within [min, max] of the window budgets.
bool in_ideal_range(Budget estimate, const IdealRange& range);

/// 0 when in range, otherwise the smallest |estimate - b| over window budgets.
std::int64_t distance_to_range(Budget estimate, const IdealRange& range);

struct EstimatorSample {
  Budget estimate;
  IdealRange range;
};

struct EstimatorQuality {
  double in_range_accuracy = 0.0;
  /// Mean distance over out-of-range samples only; absent when every sample is in range.
  std::optional<double> out_of_range_distance;
  std::size_t samples = 0;
  std::size_t in_range = 0;
};

EstimatorQuality estimator_quality(std::span<const EstimatorSample> samples);

void to_json(json& j, const IdealRange& range);

}  // namespace budgetcot
