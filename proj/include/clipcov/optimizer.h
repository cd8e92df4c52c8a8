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

#ifndef CLIPCOV_OPTIMIZER_H_
#define CLIPCOV_OPTIMIZER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "clipcov/embedding_io.h"
#include "clipcov/objective.h"

namespace clipcov {

struct GreedyOptions {
  // Ablation switch: stop as soon as the best gain is negative instead of
  // filling the budget.
  bool stop_at_negative = false;
};

// Elements in the order they were chosen and the objective of the final set.
struct SelectionRun {
  std::vector<std::size_t> order;
  ObjectiveBreakdown value;
};

// Greedy under |S| <= budget with lazily re-validated upper bounds. Picks the
// max-gain element at every step (lowest index on ties), even when that gain
// is negative. Requires clamping for the bounds to be valid; without it this
// falls back to NaiveGreedy.
SelectionRun LazyGreedy(const Objective& objective, std::size_t budget,
                        const GreedyOptions& options = {});

// Recomputes every candidate's gain at every step. Same output as LazyGreedy.
SelectionRun NaiveGreedy(const Objective& objective, std::size_t budget,
                         const GreedyOptions& options = {});

// Deterministic double greedy over the ground set `ground` (visited in the
// given order): X grows from the empty set, Y shrinks from `ground`; e joins
// X when F(e | X) >= F(Y - e) - F(Y), otherwise leaves Y.
SelectionRun DoubleGreedyFilter(const Objective& objective,
                                std::span<const std::size_t> ground);

// Each step scores `sample_size` candidates drawn uniformly without
// replacement from the unselected elements and takes the best.
//
// Sampling: the unselected elements are listed in ascending order and the
// first `sample_size` slots of a partial Fisher-Yates shuffle are used, slot
// s swapping with uniform_int_distribution<size_t>(s, m - 1) drawn from
// std::mt19937_64(seed). One generator serves the whole run.
SelectionRun StochasticGreedy(const Objective& objective, std::size_t budget,
                              std::size_t sample_size, std::uint64_t seed);

struct BruteForceResult {
  std::vector<std::size_t> best;  // ascending
  double value = 0.0;
};

// Exhaustive search over all subsets of [0, n) with at most `budget`
// elements. Ties resolve to the lexicographically smallest index list.
// kTooLarge when n > 20.
BruteForceResult BruteForceSelect(
    const std::function<double(std::span<const std::size_t>)>& evaluate,
    std::size_t n, std::size_t budget);

struct ClipCovOptions {
  bool double_greedy = true;
  GreedyOptions greedy;
};

struct ClipCovSelection {
  SelectionResult result;
  double greedy_total = 0.0;
  double double_greedy_total = 0.0;  // equals greedy_total when skipped
};

// Greedy to fill the budget, then the double-greedy filter over the greedy
// set in selection order. kBudgetTooLarge when budget > n.
ClipCovSelection SelectClipCov(const Objective& objective, std::size_t budget,
                               const ClipCovOptions& options = {});

}  // namespace clipcov

#endif  // CLIPCOV_OPTIMIZER_H_
