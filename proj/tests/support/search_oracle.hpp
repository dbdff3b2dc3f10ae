#pragma once

// Reference simulation of the halving budget search, written against plain
// maps so it shares no code with the library under test.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace oracle {

struct Reply {
  std::int64_t cost = 0;
  bool correct = false;
};

struct Curve {
  Reply vanilla;
  /// Replies per requested budget; missing budgets get `fallback`.
  std::map<std::int64_t, Reply> budgeted;
  Reply fallback{1, false};

  Reply at(std::int64_t budget) const {
    auto it = budgeted.find(budget);
    return it == budgeted.end() ? fallback : it->second;
  }
};

struct Step {
  std::int64_t budget = 0;
  std::int64_t cost = 0;
  bool correct = false;
};

struct Expected {
  bool vanilla_correct = false;
  std::optional<std::int64_t> optimal;
  std::vector<Step> trace;
  std::size_t completions = 0;
};

/// `probe_baseline` queries the budgeted prompt at the upper bound and uses
/// its cost as the first reference; otherwise the vanilla cost is used.
inline Expected simulate(const Curve& curve, bool probe_baseline) {
  Expected out;
  out.completions = 1;
  out.vanilla_correct = curve.vanilla.correct;
  const std::int64_t ub = curve.vanilla.cost;
  if (!out.vanilla_correct || ub < 1) return out;

  out.optimal = ub;
  std::int64_t reference = ub;
  if (probe_baseline) {
    const Reply r = curve.at(ub);
    out.trace.push_back({ub, r.cost, r.correct});
    ++out.completions;
    reference = r.cost;
  }
  for (int shift = 1; shift < 63 && (ub >> shift) > 0; ++shift) {
    const std::int64_t b = ub >> shift;
    const Reply r = curve.at(b);
    out.trace.push_back({b, r.cost, r.correct});
    ++out.completions;
    if (!r.correct || r.cost >= reference) break;
    reference = r.cost;
    out.optimal = b;
  }
  return out;
}

/// Exhaustive minimum-sum window: every start is summed from scratch.
struct Window {
  std::size_t start = 0;
  std::int64_t total = 0;
};

inline Window brute_force_window(const std::vector<std::int64_t>& costs, std::size_t k) {
  Window best{0, 0};
  bool have = false;
  for (std::size_t s = 0; s + k <= costs.size(); ++s) {
    std::int64_t total = 0;
    for (std::size_t i = s; i < s + k; ++i) total += costs[i];
    if (!have || total < best.total) {
      best = {s, total};
      have = true;
    }
  }
  return best;
}

}  // namespace oracle
