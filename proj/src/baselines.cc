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

#include "clipcov/baselines.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <string>

#include "clipcov/error.h"

namespace clipcov {
namespace {

void CheckBudget(std::size_t budget, std::size_t n) {
  if (budget > n) {
    throw Error(ErrorCode::kBudgetTooLarge,
                "budget " + std::to_string(budget) + " exceeds " +
                    std::to_string(n) + " examples");
  }
}

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    sum += d * d;
  }
  return sum;
}

}  // namespace

std::vector<std::size_t> TopByScore(std::span<const double> scores,
                                    std::size_t budget) {
  CheckBudget(budget, scores.size());
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  order.resize(budget);
  return order;
}

SelectionResult ClipScoreSelect(const PairedDataset& data, std::size_t budget) {
  std::vector<double> scores(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    scores[i] = Dot(data.images().row(i), data.texts().row(i));
  }
  return MakeSelectionResult(TopByScore(scores, budget), budget);
}

SelectionResult RandomSelect(std::size_t n, std::size_t budget,
                             std::uint64_t seed) {
  CheckBudget(budget, n);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t s = 0; s < budget; ++s) {
    std::uniform_int_distribution<std::size_t> pick(s, n - 1);
    std::swap(pool[s], pool[pick(rng)]);
  }
  pool.resize(budget);
  return MakeSelectionResult(std::move(pool), budget, {}, seed);
}

std::vector<std::size_t> KMeans(const EmbeddingMatrix& rows,
                                std::size_t num_clusters, std::uint64_t seed,
                                std::size_t iterations) {
  const std::size_t n = rows.count();
  const std::size_t dim = rows.dim();
  if (num_clusters == 0 || num_clusters > n) {
    throw Error(ErrorCode::kInvalidConfig,
                "num_clusters must be in [1, " + std::to_string(n) + "]");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> center_rows;
  std::vector<char> is_center(n, 0);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  center_rows.push_back(first(rng));
  is_center[center_rows.back()] = 1;
  while (center_rows.size() < num_clusters) {
    const auto latest = rows.row(center_rows.back());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], SquaredDistance(rows.row(i), latest));
      total += nearest[i];
    }
    std::size_t chosen = n;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      const double target = u(rng);
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += nearest[i];
        if (nearest[i] > 0.0 && acc >= target) {
          chosen = i;
          break;
        }
      }
      if (chosen == n) {
        for (std::size_t i = n; i-- > 0;) {
          if (nearest[i] > 0.0) {
            chosen = i;
            break;
          }
        }
      }
    } else {
      // All remaining rows coincide with a center; pick any unused row.
      std::vector<std::size_t> unused;
      for (std::size_t i = 0; i < n; ++i) {
        if (!is_center[i]) unused.push_back(i);
      }
      std::uniform_int_distribution<std::size_t> pick(0, unused.size() - 1);
      chosen = unused[pick(rng)];
    }
    center_rows.push_back(chosen);
    is_center[chosen] = 1;
  }

  std::vector<double> centers;
  centers.reserve(num_clusters * dim);
  for (std::size_t c : center_rows) {
    auto r = rows.row(c);
    centers.insert(centers.end(), r.begin(), r.end());
  }
  std::vector<std::size_t> cluster(n, 0);
  for (std::size_t iter = 0; iter <= iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < num_clusters; ++c) {
        const double d = SquaredDistance(
            rows.row(i), std::span<const double>(&centers[c * dim], dim));
        if (d < best) {
          best = d;
          cluster[i] = c;
        }
      }
    }
    if (iter == iterations) break;
    std::vector<double> sums(num_clusters * dim, 0.0);
    std::vector<std::size_t> counts(num_clusters, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto r = rows.row(i);
      for (std::size_t j = 0; j < dim; ++j) sums[cluster[i] * dim + j] += r[j];
      ++counts[cluster[i]];
    }
    for (std::size_t c = 0; c < num_clusters; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its center
      for (std::size_t j = 0; j < dim; ++j) {
        centers[c * dim + j] = sums[c * dim + j] / static_cast<double>(counts[c]);
      }
    }
  }
  return cluster;
}

SelectionResult SemDeDupSelect(const EmbeddingMatrix& images,
                               std::size_t budget, std::size_t num_clusters,
                               std::uint64_t seed) {
  const std::size_t n = images.count();
  CheckBudget(budget, n);
  if (budget == n) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    return MakeSelectionResult(std::move(all), budget, {}, seed);
  }
  const std::vector<std::size_t> cluster = KMeans(images, num_clusters, seed);
  std::vector<std::vector<std::size_t>> members(num_clusters);
  for (std::size_t i = 0; i < n; ++i) members[cluster[i]].push_back(i);

  constexpr double kDuplicateScore = 2.0;
  constexpr double kAlone = -std::numeric_limits<double>::infinity();
  auto similarity = [&](std::size_t a, std::size_t b) {
    const auto ra = images.row(a);
    const auto rb = images.row(b);
    if (std::equal(ra.begin(), ra.end(), rb.begin())) return kDuplicateScore;
    return Dot(ra, rb);
  };
  std::vector<char> kept(n, 1);
  std::vector<double> score(n, kAlone);
  auto rescore = [&](std::size_t i) {
    double best = kAlone;
    for (std::size_t j : members[cluster[i]]) {
      if (j != i && kept[j]) best = std::max(best, similarity(i, j));
    }
    score[i] = best;
  };
  for (std::size_t i = 0; i < n; ++i) rescore(i);

  // Most redundant first; ties drop the highest index. Entries go stale
  // when a cluster-mate is dropped and are re-validated on pop.
  struct Entry {
    double score;
    std::size_t index;
  };
  auto lower = [](const Entry& a, const Entry& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.index < b.index;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(lower)> heap(lower);
  for (std::size_t i = 0; i < n; ++i) heap.push({score[i], i});
  std::size_t remaining = n;
  while (remaining > budget) {
    const Entry top = heap.top();
    heap.pop();
    if (!kept[top.index] || top.score != score[top.index]) continue;
    kept[top.index] = 0;
    --remaining;
    for (std::size_t j : members[cluster[top.index]]) {
      if (!kept[j]) continue;
      const double before = score[j];
      rescore(j);
      if (score[j] != before) heap.push({score[j], j});
    }
  }
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    if (kept[i]) order.push_back(i);
  }
  return MakeSelectionResult(std::move(order), budget, {}, seed);
}

SelectionResult CrhoSelect(std::span<const double> sim_pretrained,
                           std::span<const double> sim_partial,
                           std::size_t budget) {
  if (sim_pretrained.size() != sim_partial.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "similarity arrays differ in length (" +
                    std::to_string(sim_pretrained.size()) + " vs " +
                    std::to_string(sim_partial.size()) + ")");
  }
  std::vector<double> diff(sim_pretrained.size());
  for (std::size_t i = 0; i < diff.size(); ++i) {
    diff[i] = sim_pretrained[i] - sim_partial[i];
  }
  return MakeSelectionResult(TopByScore(diff, budget), budget);
}

}  // namespace clipcov
