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

#include "clipcov/objective.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "clipcov/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace clipcov {
namespace {

using ::clipcov::testing::Instance;
using ::clipcov::testing::InstanceG;
using ::clipcov::testing::InstanceGConfig;
using ::clipcov::testing::RandomInstance;
using ::clipcov::testing::RelClose;

constexpr std::size_t kA = 0;
constexpr std::size_t kB = 1;

PairedDataset TwoPairs(std::vector<std::vector<double>> v,
                       std::vector<std::vector<double>> t) {
  return PairedDataset(EmbeddingMatrix::FromRows(v),
                       EmbeddingMatrix::FromRows(t));
}

TEST(CrossModalSimilarityTest, Examples) {
  const PairedDataset matched = TwoPairs({{1, 0}, {0, 1}}, {{1, 0}, {0, 1}});
  EXPECT_EQ(CrossModalSimilarity(matched, 0, 0), 2.0);
  EXPECT_EQ(CrossModalSimilarity(matched, 0, 1), 0.0);
  const PairedDataset tilted =
      TwoPairs({{1, 0}, {0.6, 0.8}}, {{1, 0}, {0.6, 0.8}});
  EXPECT_DOUBLE_EQ(CrossModalSimilarity(tilted, 0, 1), 1.2);
  EXPECT_THROW(CrossModalSimilarity(tilted, 0, 2), Error);
}

TEST(CrossModalSimilarityTest, Symmetric) {
  std::mt19937_64 rng(1);
  const Instance inst = RandomInstance(30, 3, 5, rng);
  for (std::size_t i = 0; i < 30; ++i) {
    for (std::size_t j = 0; j < 30; ++j) {
      EXPECT_EQ(CrossModalSimilarity(inst.data, i, j),
                CrossModalSimilarity(inst.data, j, i));
    }
  }
}

TEST(StaticGainsTest, InstanceG) {
  const Instance g = InstanceG();
  const StaticGains gains =
      PrecomputeStaticGains(g.data, g.partition, InstanceGConfig());
  EXPECT_NEAR(gains.coverage[kA], 3.0, 1e-12);
  EXPECT_NEAR(gains.coverage[kB], 3.0, 1e-12);
  EXPECT_EQ(gains.label[kA], 0.0);
  EXPECT_EQ(gains.inter[kA], 0.0);
}

TEST(StaticGainsTest, SingleClassHasNoInterTerm) {
  std::mt19937_64 rng(2);
  const Instance inst = RandomInstance(25, 1, 4, rng);
  const StaticGains gains =
      PrecomputeStaticGains(inst.data, inst.partition, ObjectiveConfig{});
  for (double x : gains.inter) EXPECT_EQ(x, 0.0);
}

TEST(StaticGainsTest, ZeroAlphaZeroesLabel) {
  std::mt19937_64 rng(3);
  const Instance inst = RandomInstance(25, 3, 4, rng);
  ObjectiveConfig config;
  config.alpha = 0.0;
  const StaticGains gains =
      PrecomputeStaticGains(inst.data, inst.partition, config);
  for (double x : gains.label) EXPECT_EQ(x, 0.0);
}

TEST(StaticGainsTest, InterIsMinusSimilarityToOtherClassMeans) {
  std::mt19937_64 rng(4);
  const Instance inst = RandomInstance(40, 4, 3, rng);
  const StaticGains gains =
      PrecomputeStaticGains(inst.data, inst.partition, ObjectiveConfig{});
  // Pairwise form: average cross similarity to every member of other classes.
  for (std::size_t e = 0; e < 40; ++e) {
    double expected = 0.0;
    for (std::size_t k = 0; k < inst.partition.num_classes(); ++k) {
      const auto& members = inst.partition.members[k];
      if (k == inst.partition.assignment[e] || members.empty()) continue;
      double sum = 0.0;
      for (std::size_t j : members) sum += CrossModalSimilarity(inst.data, e, j);
      expected -= sum / static_cast<double>(members.size());
    }
    EXPECT_NEAR(gains.inter[e], expected, 1e-12);
  }
}

TEST(StaticGainsTest, RejectsNegativeAlpha) {
  const Instance g = InstanceG();
  ObjectiveConfig config;
  config.alpha = -1.0;
  EXPECT_THROW(PrecomputeStaticGains(g.data, g.partition, config), Error);
}

TEST(MarginalGainTest, InstanceGWorkedExample) {
  const Instance g = InstanceG();
  const Objective f(g.data, g.partition, InstanceGConfig());
  SelectionState state(f);
  EXPECT_NEAR(state.MarginalGain(kA), 3.0, 1e-12);
  const std::size_t a[] = {kA};
  EXPECT_NEAR(f.Evaluate(a).total - f.Evaluate({}).total, 3.0, 1e-12);
  state.Add(kA);
  EXPECT_NEAR(state.overlap(kB), 1.0, 1e-12);
  EXPECT_NEAR(state.MarginalGain(kB), 2.5, 1e-12);
  state.Add(kB);
  EXPECT_NEAR(state.value().total, 5.5, 1e-12);
  const std::size_t ab[] = {kA, kB};
  const ObjectiveBreakdown scratch = f.Evaluate(ab);
  EXPECT_NEAR(scratch.f_class, 1.5, 1e-12);
  EXPECT_NEAR(scratch.f_self, 4.0, 1e-12);
  EXPECT_NEAR(scratch.total, 5.5, 1e-12);
}

TEST(MarginalGainTest, AllTermsDisabledIsZero) {
  std::mt19937_64 rng(5);
  const Instance inst = RandomInstance(10, 2, 3, rng);
  ObjectiveConfig off{0.5, false, false, false, false, false, true};
  const Objective f(inst.data, inst.partition, off);
  SelectionState state(f);
  for (std::size_t e = 0; e < 10; ++e) EXPECT_EQ(state.MarginalGain(e), 0.0);
}

TEST(SelectionStateTest, ErrorsOnMisuse) {
  const Instance g = InstanceG();
  const Objective f(g.data, g.partition, InstanceGConfig());
  SelectionState state(f);
  try {
    state.Remove(kA);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotSelected);
  }
  state.Add(kA);
  try {
    state.Add(kA);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAlreadySelected);
  }
  EXPECT_THROW(state.Add(5), Error);
}

TEST(SelectionStateTest, RemoveRestoresInstanceG) {
  const Instance g = InstanceG();
  const Objective f(g.data, g.partition, InstanceGConfig());
  SelectionState state(f);
  state.Add(kA);
  state.Add(kB);
  state.Remove(kB);
  EXPECT_NEAR(state.value().total, 3.0, 1e-12);
  state.Remove(kA);
  EXPECT_NEAR(state.value().total, 0.0, 1e-12);
  EXPECT_EQ(state.overlap(kA), 0.0);
  EXPECT_EQ(state.overlap(kB), 0.0);
  EXPECT_EQ(state.size(), 0u);
}

TEST(SelectionStateTest, AddThenRemoveRestoresOverlapsExactly) {
  std::mt19937_64 rng(6);
  const Instance inst = RandomInstance(60, 3, 4, rng);
  const Objective f(inst.data, inst.partition);
  SelectionState state(f);
  for (std::size_t e : {3u, 17u, 40u, 8u}) state.Add(e);
  std::vector<double> before(60);
  for (std::size_t j = 0; j < 60; ++j) before[j] = state.overlap(j);
  state.Add(25);
  state.Remove(25);
  for (std::size_t j = 0; j < 60; ++j) EXPECT_EQ(state.overlap(j), before[j]);
}

TEST(SelectionStateTest, AddIsClassLocal) {
  std::mt19937_64 rng(7);
  const Instance inst = RandomInstance(50, 4, 4, rng);
  const Objective f(inst.data, inst.partition);
  SelectionState state(f);
  const std::size_t e = 0;
  const std::uint32_t k = inst.partition.assignment[e];
  state.Add(e);
  for (std::size_t j = 0; j < 50; ++j) {
    if (inst.partition.assignment[j] != k) EXPECT_EQ(state.overlap(j), 0.0);
  }
}

TEST(SelectionStateTest, RemovalDeltaMatchesRemove) {
  std::mt19937_64 rng(8);
  const Instance inst = RandomInstance(80, 3, 5, rng);
  const Objective f(inst.data, inst.partition);
  SelectionState state(f);
  for (std::size_t e = 0; e < 80; e += 7) state.Add(e);
  const double before = state.value().total;
  const double delta = state.RemovalDelta(14);
  state.Remove(14);
  EXPECT_TRUE(RelClose(state.value().total - before, delta));
}

TEST(EvaluateTest, EmptySetIsZero) {
  std::mt19937_64 rng(9);
  const Instance inst = RandomInstance(20, 2, 3, rng);
  const ObjectiveBreakdown b = Objective(inst.data, inst.partition).Evaluate({});
  EXPECT_EQ(b.f_class, 0.0);
  EXPECT_EQ(b.f_self, 0.0);
  EXPECT_EQ(b.f_label, 0.0);
  EXPECT_EQ(b.f_reg, 0.0);
  EXPECT_EQ(b.f_inter, 0.0);
  EXPECT_EQ(b.total, 0.0);
}

TEST(EvaluateTest, BreakdownSumIdentity) {
  std::mt19937_64 rng(10);
  const Instance inst = RandomInstance(40, 3, 4, rng);
  const std::vector<std::size_t> s = {1, 5, 9, 22, 31};
  const ObjectiveBreakdown b = Objective(inst.data, inst.partition).Evaluate(s);
  EXPECT_EQ(b.total, b.f_class + b.f_self + b.f_label - b.f_reg + b.f_inter);
}

TEST(EvaluateTest, RejectsBadIndices) {
  const Instance g = InstanceG();
  const Objective f(g.data, g.partition);
  const std::size_t dup[] = {0, 0};
  const std::size_t out[] = {2};
  EXPECT_THROW(f.Evaluate(dup), Error);
  EXPECT_THROW(f.Evaluate(out), Error);
}

// Random walks of adds and removes against scratch evaluation.
TEST(ObjectivePropertyTest, IncrementalMatchesScratch) {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = RandomInstance(60, 4, 6, rng);
    ObjectiveConfig config;
    config.clamp_negative = trial % 2 == 0;
    const Objective f(inst.data, inst.partition, config);
    SelectionState state(f);
    std::uniform_int_distribution<std::size_t> pick(0, 59);
    for (int step = 0; step < 120; ++step) {
      const std::size_t e = pick(rng);
      if (state.Contains(e)) {
        state.Remove(e);
      } else {
        state.Add(e);
      }
      const ObjectiveBreakdown scratch = f.Evaluate(state.order());
      ASSERT_TRUE(RelClose(state.value().total, scratch.total))
          << state.value().total << " vs " << scratch.total;
    }
  }
}

TEST(ObjectivePropertyTest, Submodular) {
  std::mt19937_64 rng(21);
  std::bernoulli_distribution coin(0.3);
  for (int trial = 0; trial < 200; ++trial) {
    const Instance inst = RandomInstance(24, 2, 3, rng);
    const Objective f(inst.data, inst.partition);
    SelectionState small(f);
    SelectionState large(f);
    std::vector<std::size_t> outside;
    for (std::size_t i = 0; i < 24; ++i) {
      if (coin(rng)) {
        small.Add(i);
        large.Add(i);
      } else if (coin(rng)) {
        large.Add(i);
      } else {
        outside.push_back(i);
      }
    }
    for (std::size_t e : outside) {
      EXPECT_GE(small.MarginalGain(e), large.MarginalGain(e) - 1e-9);
    }
  }
}

TEST(ObjectivePropertyTest, SideTermsAreModular) {
  std::mt19937_64 rng(22);
  const Instance inst = RandomInstance(30, 3, 4, rng);
  ObjectiveConfig config;
  config.use_class = false;
  const Objective f(inst.data, inst.partition, config);
  SelectionState empty(f);
  SelectionState busy(f);
  for (std::size_t i = 0; i < 30; i += 2) busy.Add(i);
  for (std::size_t e = 1; e < 30; e += 2) {
    EXPECT_EQ(empty.MarginalGain(e), busy.MarginalGain(e));
  }
}

TEST(ObjectivePropertyTest, NegativeGainsExist) {
  // Unclamped class term: two antipodal pairs in one class.
  const PairedDataset data = TwoPairs({{1, 0}, {-1, 0}}, {{1, 0}, {-1, 0}});
  {
    const ClassPartition p =
        BuildPartition(data, {0, 0}, EmbeddingMatrix::FromRows({{1, 0}}));
    ObjectiveConfig config{0.0, true, false, false, false, false, false};
    const Objective f(data, p, config);
    EXPECT_DOUBLE_EQ(SelectionState(f).MarginalGain(0), -0.5);
  }
  // Clamped class + self term with mismatched pairs.
  const PairedDataset anti = TwoPairs({{1, 0}, {-1, 0}}, {{-1, 0}, {1, 0}});
  {
    const ClassPartition p =
        BuildPartition(anti, {0, 0}, EmbeddingMatrix::FromRows({{1, 0}}));
    ObjectiveConfig config{0.0, true, true, false, false, false, true};
    const Objective f(anti, p, config);
    EXPECT_DOUBLE_EQ(SelectionState(f).MarginalGain(0), -1.0);
  }
}

}  // namespace
}  // namespace clipcov
