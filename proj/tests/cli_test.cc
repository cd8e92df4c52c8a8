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

#include "clipcov/cli.h"

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "clipcov/embedding_io.h"
#include "clipcov/objective.h"
#include "clipcov/partition.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "test_util.h"

namespace clipcov {
namespace {

using ::clipcov::testing::RelClose;
using ::clipcov::testing::TempDir;

int RunArgs(const std::vector<std::string>& args, std::string* log = nullptr) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = RunCli(args, out, err);
  if (log) *log = err.str();
  return code;
}

class CliTest : public ::testing::Test {
 protected:
  CliTest() : dir_("cli") {}

  std::string P(const std::string& name) const { return (dir_ / name).string(); }

  void Synth() {
    ASSERT_EQ(RunArgs({"synth", "--out-dir", dir_.path().string(), "--n", "150",
                   "--classes", "4", "--latent-dim", "6", "--vision-dim", "8",
                   "--language-dim", "8", "--seed", "5", "--reproducible"}),
              0);
    ASSERT_EQ(RunArgs({"partition", "--images", P("train_proxy_images.ccem"),
                   "--labels", P("proxy_labels.ccem"), "--label-map",
                   P("proxy_labels.json"), "--out", P("classes.ccpa")}),
              0);
  }

  std::vector<std::string> SelectArgs(const std::string& budget) const {
    return {"select",         "--images",
            P("train_proxy_images.ccem"), "--texts",
            P("train_proxy_texts.ccem"),  "--partition",
            P("classes.ccpa"),  "--labels",
            P("proxy_labels.ccem"),       "--label-map",
            P("proxy_labels.json"),       "--budget",
            budget,           "--out",
            P("sel.txt"),     "--report",
            P("sel.json"),    "--reproducible"};
  }

  TempDir dir_;
};

TEST_F(CliTest, ZeroBudgetIsEmptySelection) {
  Synth();
  ASSERT_EQ(RunArgs(SelectArgs("0")), 0);
  EXPECT_EQ(ReadTextFile(P("sel.txt")), "");
  const auto report = nlohmann::json::parse(ReadTextFile(P("sel.json")));
  EXPECT_EQ(report.at("selected"), 0);
  EXPECT_EQ(report.at("objective").at("total"), 0.0);
}

TEST_F(CliTest, BudgetAboveNIsUsageError) {
  Synth();
  std::string log;
  EXPECT_EQ(RunArgs(SelectArgs("1000"), &log), 2);
  EXPECT_NE(log.find("UsageError"), std::string::npos);
  EXPECT_NE(log.find("remedy"), std::string::npos);
}

TEST_F(CliTest, ReportSchemaAndObjectiveRoundTrip) {
  Synth();
  ASSERT_EQ(RunArgs(SelectArgs("20")), 0);
  const auto report = nlohmann::json::parse(ReadTextFile(P("sel.json")));
  for (const char* key :
       {"command", "config", "versions", "n", "k_classes", "budget",
        "selected", "indices_path", "objective", "phase_totals",
        "wall_seconds", "selection_order", "seed"}) {
    EXPECT_TRUE(report.contains(key)) << key;
  }
  EXPECT_EQ(report.at("wall_seconds"), 0.0);
  EXPECT_TRUE(report.at("phase_totals").contains("greedy"));
  EXPECT_TRUE(report.at("phase_totals").contains("double_greedy"));

  const PairedDataset data(
      NormalizeRows(LoadEmbeddings(P("train_proxy_images.ccem"))),
      NormalizeRows(LoadEmbeddings(P("train_proxy_texts.ccem"))));
  const EmbeddingMatrix prototypes = BuildPrototypes(
      LoadLabelBank(P("proxy_labels.ccem"), dir_ / "proxy_labels.json"));
  const ClassPartition partition =
      BuildPartition(data, LoadAssignment(P("classes.ccpa")).ids, prototypes);
  const Objective f(data, partition);
  const SelectionResult sel = ReadSelection(P("sel.txt"), P("sel.json"));
  EXPECT_TRUE(RelClose(f.Evaluate(sel.indices).total,
                       report.at("objective").at("total").get<double>()));
}

TEST_F(CliTest, PipelineIsDeterministicAcrossThreadCounts) {
  Synth();
  auto pipeline = [&](const char* threads) {
    setenv("CLIPCOV_THREADS", threads, 1);
    EXPECT_EQ(RunArgs(SelectArgs("25")), 0);
    EXPECT_EQ(RunArgs({"eval", "--train-images", P("train_images.ccem"),
                   "--train-texts", P("train_texts.ccem"), "--subset",
                   P("sel.txt"), "--eval-images", P("eval_images.ccem"),
                   "--eval-classes", P("eval_classes.ccpa"), "--label-vectors",
                   P("label_vectors.ccem"), "--report", P("eval.json"),
                   "--reproducible"}),
              0);
    return ReadTextFile(P("sel.txt")) + ReadTextFile(P("sel.json")) +
           ReadTextFile(P("eval.json"));
  };
  const std::string one = pipeline("1");
  const std::string four = pipeline("4");
  unsetenv("CLIPCOV_THREADS");
  EXPECT_EQ(one, four);
}

TEST_F(CliTest, BaselinesAndDiagnose) {
  Synth();
  for (const char* method : {"clip-score", "random", "semdedup"}) {
    EXPECT_EQ(RunArgs({"baseline", "--method", method, "--images",
                   P("train_proxy_images.ccem"), "--texts",
                   P("train_proxy_texts.ccem"), "--budget", "10", "--out",
                   P("b.txt"), "--report", P("b.json")}),
              0)
        << method;
    EXPECT_EQ(ReadIndexFile(P("b.txt")).size(), 10u);
  }
  SaveEmbeddings(EmbeddingMatrix(3, 1, {0.9, 0.8, 0.1}), P("pre.ccem"));
  SaveEmbeddings(EmbeddingMatrix(3, 1, {0.5, 0.7, 0.1}), P("partial.ccem"));
  EXPECT_EQ(RunArgs({"baseline", "--method", "crho", "--sim-pretrained",
                 P("pre.ccem"), "--sim-partial", P("partial.ccem"), "--budget",
                 "1", "--out", P("c.txt"), "--report", P("c.json")}),
            0);
  EXPECT_EQ(ReadTextFile(P("c.txt")), "0\n");

  ASSERT_EQ(RunArgs(SelectArgs("12")), 0);
  ASSERT_EQ(RunArgs({"diagnose", "--images", P("train_proxy_images.ccem"),
                 "--texts", P("train_proxy_texts.ccem"), "--partition",
                 P("classes.ccpa"), "--labels", P("proxy_labels.ccem"),
                 "--label-map", P("proxy_labels.json"), "--subset",
                 P("sel.txt"), "--report", P("diag.json")}),
            0);
  const auto diag = nlohmann::json::parse(ReadTextFile(P("diag.json")));
  for (const char* key :
       {"sigmas", "conductance", "labeling_error", "cross_cov_gap_frobenius",
        "cross_cov_gap_spectral", "weyl_bound", "sigma_gap"}) {
    EXPECT_TRUE(diag.contains(key)) << key;
  }
  EXPECT_LE(diag.at("sigma_gap").get<double>(),
            diag.at("weyl_bound").get<double>() + 1e-9);
}

TEST_F(CliTest, InputErrorsExitTwo) {
  EXPECT_EQ(RunArgs({}), 2);
  EXPECT_EQ(RunArgs({"select"}), 2);
  EXPECT_EQ(RunArgs({"baseline", "--method", "nope", "--budget", "1", "--out",
                 P("x"), "--report", P("y")}),
            2);
  EXPECT_EQ(RunArgs({"partition", "--images", P("missing.ccem"), "--labels",
                 P("missing.ccem"), "--out", P("x.ccpa")}),
            2);
  WriteTextFile(P("bad.ccem"), "XXXXXXXXXXXXXXXXXXXXXXXXXXXX");
  std::string log;
  EXPECT_EQ(RunArgs({"partition", "--images", P("bad.ccem"), "--labels",
                 P("bad.ccem"), "--out", P("x.ccpa")},
                &log),
            2);
  EXPECT_NE(log.find("BadMagic"), std::string::npos);
}

TEST_F(CliTest, LabelTermNeedsLabels) {
  Synth();
  std::vector<std::string> args = {
      "select", "--images", P("train_proxy_images.ccem"), "--texts",
      P("train_proxy_texts.ccem"), "--partition", P("classes.ccpa"),
      "--budget", "5", "--out", P("s.txt"), "--report", P("s.json")};
  EXPECT_EQ(RunArgs(args), 2);
  args.push_back("--no-label");
  EXPECT_EQ(RunArgs(args), 0);
}

TEST_F(CliTest, Version) {
  std::ostringstream out;
  std::ostringstream err;
  EXPECT_EQ(RunCli({"--version"}, out, err), 0);
  EXPECT_NE(out.str().find(kVersion), std::string::npos);
}

}  // namespace
}  // namespace clipcov
