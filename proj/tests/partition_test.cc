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

#include "clipcov/partition.h"

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "clipcov/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace clipcov {
namespace {

using ::clipcov::testing::RandomUnitRows;
using ::clipcov::testing::TempDir;

LabelBank Bank(const std::vector<std::vector<double>>& rows,
               std::vector<std::size_t> label_of_row, std::size_t labels) {
  return MakeLabelBank(EmbeddingMatrix::FromRows(rows), std::move(label_of_row),
                       labels);
}

TEST(BuildPrototypesTest, MeanThenRenormalize) {
  const EmbeddingMatrix p = BuildPrototypes(Bank({{1, 0}, {0, 1}}, {0, 0}, 1));
  EXPECT_NEAR(p(0, 0), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(p(0, 1), 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(BuildPrototypesTest, SingleTemplateIsIdentity) {
  const EmbeddingMatrix p = BuildPrototypes(Bank({{0, 1}}, {0}, 1));
  EXPECT_EQ(p(0, 0), 0.0);
  EXPECT_EQ(p(0, 1), 1.0);
}

TEST(BuildPrototypesTest, AntipodalTemplatesAreDegenerate) {
  try {
    BuildPrototypes(Bank({{1, 0}, {-1, 0}}, {0, 0}, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroRow);
  }
}

TEST(LabelBankTest, SidecarGroupsRows) {
  TempDir dir("bank");
  SaveEmbeddings(EmbeddingMatrix::FromRows({{1, 0}, {0, 1}, {0, 1}}),
                 dir / "t.ccem");
  WriteTextFile(dir / "t.json",
                R"({"labels": [{"name": "cat", "begin": 0, "end": 2},)"
                R"( {"name": "dog", "begin": 2, "end": 3}]})");
  const LabelBank bank = LoadLabelBank(dir / "t.ccem", dir / "t.json");
  EXPECT_EQ(bank.num_labels, 2u);
  EXPECT_EQ(bank.label_of_row, (std::vector<std::size_t>{0, 0, 1}));
  EXPECT_EQ(bank.names, (std::vector<std::string>{"cat", "dog"}));

  const LabelBank plain = LoadLabelBank(dir / "t.ccem", std::nullopt);
  EXPECT_EQ(plain.num_labels, 3u);

  WriteTextFile(dir / "gap.json",
                R"({"labels": [{"name": "cat", "begin": 0, "end": 1},)"
                R"( {"name": "dog", "begin": 2, "end": 3}]})");
  EXPECT_THROW(LoadLabelBank(dir / "t.ccem", dir / "gap.json"), Error);
}

TEST(NearestPrototypeTest, Examples) {
  const EmbeddingMatrix protos = EmbeddingMatrix::FromRows({{1, 0}, {0, 1}});
  const double h = 1.0 / std::sqrt(2.0);
  const EmbeddingMatrix images =
      NormalizeRows(EmbeddingMatrix::FromRows({{0.9, 0.1}, {h, h}}));
  EXPECT_EQ(NearestPrototype(images, protos),
            (std::vector<std::uint32_t>{0, 0}));
}

TEST(AssignClassesTest, EmptyClassIsLegal) {
  const EmbeddingMatrix rows =
      EmbeddingMatrix::FromRows({{0.1, 1}, {0, 1}, {-0.2, 1}});
  const PairedDataset data(NormalizeRows(rows), NormalizeRows(rows));
  const ClassPartition p =
      AssignClasses(data, EmbeddingMatrix::FromRows({{1, 0}, {0, 1}}));
  EXPECT_EQ(p.class_sizes(), (std::vector<std::size_t>{0, 3}));
  EXPECT_TRUE(p.members[0].empty());
  for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(p.class_image_mean(0, j), 0.0);
}

TEST(AssignClassesTest, DimMismatch) {
  const PairedDataset data(EmbeddingMatrix::FromRows({{1, 0}}),
                           EmbeddingMatrix::FromRows({{1, 0}}));
  EXPECT_THROW(AssignClasses(data, EmbeddingMatrix::FromRows({{1, 0, 0}})),
               Error);
}

TEST(AssignClassesTest, LabelOrderEquivariance) {
  std::mt19937_64 rng(11);
  const PairedDataset data(RandomUnitRows(300, 6, rng),
                           RandomUnitRows(300, 6, rng));
  const EmbeddingMatrix protos = RandomUnitRows(7, 6, rng);
  std::vector<std::size_t> perm(7);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  // Row r of `permuted` is prototype perm[r].
  const EmbeddingMatrix permuted = protos.Subset(perm);
  const ClassPartition a = AssignClasses(data, protos);
  const ClassPartition b = AssignClasses(data, permuted);
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(perm[b.assignment[i]], a.assignment[i]);
  }
}

TEST(AssignClassesTest, ReassignmentIsFixedPoint) {
  std::mt19937_64 rng(12);
  const PairedDataset data(RandomUnitRows(200, 5, rng),
                           RandomUnitRows(200, 5, rng));
  const ClassPartition a = AssignClasses(data, RandomUnitRows(4, 5, rng));
  const ClassPartition b = AssignClasses(data, a.prototypes);
  EXPECT_EQ(a.assignment, b.assignment);
}

TEST(AssignClassesTest, ClassMeansMatchArithmeticMean) {
  std::mt19937_64 rng(13);
  const PairedDataset data(RandomUnitRows(150, 4, rng),
                           RandomUnitRows(150, 4, rng));
  const ClassPartition p = AssignClasses(data, RandomUnitRows(5, 4, rng));
  for (std::size_t k = 0; k < p.num_classes(); ++k) {
    if (p.members[k].empty()) continue;
    for (std::size_t j = 0; j < 4; ++j) {
      double sv = 0.0;
      double st = 0.0;
      for (std::size_t i : p.members[k]) {
        sv += data.images()(i, j);
        st += data.texts()(i, j);
      }
      const double m = static_cast<double>(p.members[k].size());
      EXPECT_NEAR(p.class_image_mean(k, j), sv / m, 1e-12);
      EXPECT_NEAR(p.class_text_mean(k, j), st / m, 1e-12);
    }
  }
}

TEST(AssignClassesTest, ToAssignmentRoundTrips) {
  std::mt19937_64 rng(14);
  const PairedDataset data(RandomUnitRows(40, 3, rng),
                           RandomUnitRows(40, 3, rng));
  const ClassPartition p = AssignClasses(data, RandomUnitRows(3, 3, rng));
  const ClassAssignment a = p.ToAssignment();
  EXPECT_EQ(a.num_classes, 3u);
  EXPECT_EQ(a.ids, p.assignment);
}

}  // namespace
}  // namespace clipcov
