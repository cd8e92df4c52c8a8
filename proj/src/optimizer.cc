// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "clipcov/optimizer.h"

#include <algorithm>
#include <bit>
#include <numeric>
#include <queue>
#include <random>
#include <string>
#include <utility>

#include "clipcov/error.h"

namespace clipcov {
namespace {

// Heap entry: stale upper bound on the gain of `element`.
struct Candidate {
  double gain;
  std::size_t element;
};

// Larger gain first, then lower index.
bool Precedes(const Candidate& a, const Candidate& b) {
  if (a.gain != b.gain) return a.gain > b.gain;
  return a.element < b.element;
}

struct HeapOrder {
  bool operator()(const Candidate& a, const Candidate& b) const {
    return Precedes(b, a);
  }
};

}  // namespace

SelectionRun NaiveGreedy(const Objective& objective, std::size_t budget,
                         const GreedyOptions& options) {
  SelectionState state(objective);
  const std::size_t n = objective.size();
  const std::size_t target = std::min(budget, n);
  while (state.size() < target) {
    bool found = false;
    Candidate best{0.0, 0};
    for (std::size_t e = 0; e < n; ++e) {
      if (state.Contains(e)) continue;
      const Candidate c{state.MarginalGain(e), e};
      if (!found || Precedes(c, best)) {
        best = c;
        found = true;
      }
    }
    if (options.stop_at_negative && best.gain < 0.0) break;
    state.Add(best.element);
  }
  return {state.order(), state.value()};
}

SelectionRun LazyGreedy(const Objective& objective, std::size_t budget,
                        const GreedyOptions& options) {
  if (!objective.config().clamp_negative) {
    return NaiveGreedy(objective, budget, options);
  }
  SelectionState state(objective);
  const std::size_t n = objective.size();
  const std::size_t target = std::min(budget, n);
  std::priority_queue<Candidate, std::vector<Candidate>, HeapOrder> heap;
  for (std::size_t e = 0; e < n && target > 0; ++e) {
    heap.push({state.MarginalGain(e), e});
  }
  while (state.size() < target && !heap.empty()) {
    Candidate top = heap.top();
    heap.pop();
    top.gain = state.MarginalGain(top.element);
    // Every other true gain is bounded by its stale key, so beating the next
    // key (with the same tie-break) makes top the exact argmax.
    if (!heap.empty() && !Precedes(top, heap.top())) {
      heap.push(top);
      continue;
    }
    if (options.stop_at_negative && top.gain < 0.0) break;
    state.Add(top.element);
  }
  return {state.order(), state.value()};
}

SelectionRun DoubleGreedyFilter(const Objective& objective,
                                std::span<const std::size_t> ground) {
  SelectionState grow(objective);
  SelectionState shrink(objective);
  for (std::size_t e : ground) shrink.Add(e);
  for (std::size_t e : ground) {
    const double add_gain = grow.MarginalGain(e);
    const double remove_gain = shrink.RemovalDelta(e);
    if (add_gain >= remove_gain) {
      grow.Add(e);
    } else {
      shrink.Remove(e);
    }
  }
  return {grow.order(), grow.value()};
}

SelectionRun StochasticGreedy(const Objective& objective, std::size_t budget,
                              std::size_t sample_size, std::uint64_t seed) {
  const std::size_t n = objective.size();
  if (sample_size == 0 || sample_size > n) {
    throw Error(ErrorCode::kInvalidConfig,
                "sample size must be in [1, " + std::to_string(n) + "]");
  }
  std::mt19937_64 rng(seed);
  SelectionState state(objective);
  std::vector<std::size_t> remaining(n);
  std::iota(remaining.begin(), remaining.end(), 0);
  const std::size_t target = std::min(budget, n);
  std::vector<std::size_t> pool;
  while (state.size() < target) {
    pool = remaining;
    const std::size_t m = pool.size();
    const std::size_t draws = std::min(sample_size, m);
    for (std::size_t s = 0; s < draws; ++s) {
      std::uniform_int_distribution<std::size_t> pick(s, m - 1);
      std::swap(pool[s], pool[pick(rng)]);
    }
    Candidate best{state.MarginalGain(pool[0]), pool[0]};
    for (std::size_t s = 1; s < draws; ++s) {
      const Candidate c{state.MarginalGain(pool[s]), pool[s]};
      if (Precedes(c, best)) best = c;
    }
    state.Add(best.element);
    remaining.erase(
        std::lower_bound(remaining.begin(), remaining.end(), best.element));
  }
  return {state.order(), state.value()};
}

BruteForceResult BruteForceSelect(
    const std::function<double(std::span<const std::size_t>)>& evaluate,
    std::size_t n, std::size_t budget) {
  constexpr std::size_t kMaxElements = 20;
  if (n > kMaxElements) {
    throw Error(ErrorCode::kTooLarge,
                "brute force limited to n <= 20, got " + std::to_string(n));
  }
  BruteForceResult best;
  bool found = false;
  std::vector<std::size_t> subset;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) > budget) continue;
    subset.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) subset.push_back(i);
    }
    const double value = evaluate(subset);
    if (!found || value > best.value ||
        (value == best.value && subset < best.best)) {
      best.best = subset;
      best.value = value;
      found = true;
    }
  }
  return best;
}

ClipCovSelection SelectClipCov(const Objective& objective, std::size_t budget,
                               const ClipCovOptions& options) {
  if (budget > objective.size()) {
    throw Error(ErrorCode::kBudgetTooLarge,
                "budget " + std::to_string(budget) + " exceeds " +
                    std::to_string(objective.size()) + " examples");
  }
  ClipCovSelection out;
  SelectionRun run = LazyGreedy(objective, budget, options.greedy);
  out.greedy_total = objective.Evaluate(run.order).total;
  if (options.double_greedy) {
    run = DoubleGreedyFilter(objective, run.order);
  }
  const ObjectiveBreakdown value = objective.Evaluate(run.order);
  out.double_greedy_total = value.total;
  out.result = MakeSelectionResult(std::move(run.order), budget, value);
  return out;
}

}  // namespace clipcov
