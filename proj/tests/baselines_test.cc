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
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "clipcov/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace clipcov {
namespace {

using ::clipcov::testing::RandomUnitRows;

std::vector<std::size_t> Iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

void ExpectValid(const SelectionResult& r, std::size_t n, std::size_t budget) {
  EXPECT_EQ(r.indices.size(), budget);
  EXPECT_TRUE(std::is_sorted(r.indices.begin(), r.indices.end()));
  EXPECT_EQ(std::set<std::size_t>(r.indices.begin(), r.indices.end()).size(),
            budget);
  for (std::size_t i : r.indices) EXPECT_LT(i, n);
}

PairedDataset SelfSimilarities(const std::vector<double>& values) {
  std::vector<std::vector<double>> v;
  std::vector<std::vector<double>> t;
  for (double x : values) {
    v.push_back({1.0, 0.0});
    t.push_back({x, std::sqrt(1.0 - x * x)});
  }
  return PairedDataset(EmbeddingMatrix::FromRows(v),
                       EmbeddingMatrix::FromRows(t));
}

TEST(ClipScoreTest, TopBySelfSimilarity) {
  const PairedDataset data = SelfSimilarities({0.9, 0.2, 0.5});
  EXPECT_EQ(ClipScoreSelect(data, 2).indices,
            (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(ClipScoreSelect(data, 3).indices, Iota(3));
}

TEST(ClipScoreTest, TiesKeepLowestIndex) {
  const PairedDataset data = SelfSimilarities({0.3, 0.3, 0.3});
  EXPECT_EQ(ClipScoreSelect(data, 1).indices, (std::vector<std::size_t>{0}));
}

TEST(ClipScoreTest, BudgetTooLarge) {
  const PairedDataset data = SelfSimilarities({0.3});
  EXPECT_THROW(ClipScoreSelect(data, 2), Error);
}

TEST(RandomSelectTest, DeterministicAndValid) {
  const SelectionResult a = RandomSelect(100, 30, 5);
  const SelectionResult b = RandomSelect(100, 30, 5);
  EXPECT_EQ(a.indices, b.indices);
  EXPECT_EQ(a.seed, std::optional<std::uint64_t>(5));
  ExpectValid(a, 100, 30);
  EXPECT_EQ(RandomSelect(10, 10, 1).indices, Iota(10));
}

TEST(RandomSelectTest, SeedsDiffer) {
  EXPECT_NE(RandomSelect(1000, 500, 1).indices,
            RandomSelect(1000, 500, 2).indices);
}

TEST(SemDeDupTest, DropsOneOfADuplicatePair) {
  std::mt19937_64 rng(1);
  EmbeddingMatrix rows = RandomUnitRows(6, 4, rng);
  auto dup = rows.mutable_row(4);
  std::copy(rows.row(1).begin(), rows.row(1).end(), dup.begin());
  const SelectionResult r = SemDeDupSelect(rows, 5, 1, 0);
  ExpectValid(r, 6, 5);
  const bool has1 = std::binary_search(r.indices.begin(), r.indices.end(), 1);
  const bool has4 = std::binary_search(r.indices.begin(), r.indices.end(), 4);
  EXPECT_NE(has1, has4);
}

TEST(SemDeDupTest, FullBudgetIsIdentity) {
  std::mt19937_64 rng(2);
  const EmbeddingMatrix rows = RandomUnitRows(9, 3, rng);
  EXPECT_EQ(SemDeDupSelect(rows, 9, 3, 0).indices, Iota(9));
}

TEST(SemDeDupTest, CoincidentPairAndOrthogonalPoint) {
  const EmbeddingMatrix rows =
      EmbeddingMatrix::FromRows({{1, 0}, {1, 0}, {0, 1}});
  const SelectionResult r = SemDeDupSelect(rows, 2, 1, 0);
  ASSERT_EQ(r.indices.size(), 2u);
  EXPECT_EQ(r.indices[1], 2u);
  EXPECT_LT(r.indices[0], 2u);
}

TEST(SemDeDupTest, SingletonClustersKeepFirstIndices) {
  std::mt19937_64 rng(3);
  const EmbeddingMatrix rows = RandomUnitRows(12, 5, rng);
  EXPECT_EQ(SemDeDupSelect(rows, 7, 12, 4).indices, Iota(7));
}

TEST(KMeansTest, SeparatesObviousClusters) {
  const EmbeddingMatrix rows = EmbeddingMatrix::FromRows(
      {{1, 0}, {0.99, 0.01}, {0, 1}, {0.01, 0.99}, {0.98, 0.02}});
  const std::vector<std::size_t> c = KMeans(rows, 2, 0);
  EXPECT_EQ(c[0], c[1]);
  EXPECT_EQ(c[0], c[4]);
  EXPECT_EQ(c[2], c[3]);
  EXPECT_NE(c[0], c[2]);
  EXPECT_EQ(KMeans(rows, 2, 0), c);
}

TEST(CrhoTest, Examples) {
  EXPECT_EQ(CrhoSelect(std::vector<double>{0.9, 0.8},
                       std::vector<double>{0.5, 0.7}, 1)
                .indices,
            (std::vector<std::size_t>{0}));
  const std::vector<double> same = {0.4, 0.1, 0.7, 0.2};
  EXPECT_EQ(CrhoSelect(same, same, 2).indices,
            (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(CrhoSelect(same, same, 4).indices, Iota(4));
  EXPECT_THROW(CrhoSelect(same, std::vector<double>{0.1}, 1), Error);
}

TEST(BaselinesPropertyTest, ExactBudgetDistinctInRange) {
  std::mt19937_64 rng(4);
  const std::size_t n = 90;
  const PairedDataset data(RandomUnitRows(n, 6, rng), RandomUnitRows(n, 6, rng));
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> pre(n);
  std::vector<double> partial(n);
  for (std::size_t i = 0; i < n; ++i) {
    pre[i] = u(rng);
    partial[i] = u(rng);
  }
  for (std::size_t budget : {0u, 1u, 17u, 89u, 90u}) {
    ExpectValid(ClipScoreSelect(data, budget), n, budget);
    ExpectValid(RandomSelect(n, budget, 3), n, budget);
    ExpectValid(SemDeDupSelect(data.images(), budget, 10, 3), n, budget);
    ExpectValid(CrhoSelect(pre, partial, budget), n, budget);
  }
}

TEST(BaselinesPropertyTest, ClipScoreRanksByDiagonalSimilarity) {
  std::mt19937_64 rng(5);
  const PairedDataset data(RandomUnitRows(50, 4, rng),
                           RandomUnitRows(50, 4, rng));
  const SelectionResult r = ClipScoreSelect(data, 10);
  double worst_kept = 1e9;
  for (std::size_t i : r.indices) {
    worst_kept = std::min(worst_kept, Dot(data.images().row(i),
                                          data.texts().row(i)));
  }
  for (std::size_t i = 0; i < 50; ++i) {
    if (std::binary_search(r.indices.begin(), r.indices.end(), i)) continue;
    EXPECT_LE(Dot(data.images().row(i), data.texts().row(i)), worst_kept);
  }
}

}  // namespace
}  // namespace clipcov
