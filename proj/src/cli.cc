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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clipcov/baselines.h"
#include "clipcov/diagnostics.h"
#include "clipcov/embedding_io.h"
#include "clipcov/error.h"
#include "clipcov/objective.h"
#include "clipcov/optimizer.h"
#include "clipcov/partition.h"
#include "clipcov/synth.h"
#include "json.hpp"

namespace clipcov {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

Error Usage(const std::string& problem, const std::string& remedy) {
  return Error(ErrorCode::kUsage, problem + " (remedy: " + remedy + ")");
}

json Versions() {
  return {{"clipcov", kVersion},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                                "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"cli11", CLI11_VERSION}};
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

struct CommonOptions {
  bool reproducible = false;
  bool no_normalize = false;
};

// Report skeleton shared by every subcommand.
json BaseReport(const std::string& command, const json& config) {
  json report;
  report["command"] = command;
  report["config"] = config;
  report["versions"] = Versions();
  return report;
}

double WallSeconds(const Stopwatch& watch, const CommonOptions& common) {
  return common.reproducible ? 0.0 : watch.Seconds();
}

void WriteReport(const json& report, const std::string& path) {
  WriteTextFile(path, report.dump(2) + "\n");
}

EmbeddingMatrix LoadRows(const std::string& path, bool normalize,
                         std::optional<std::size_t> dim = std::nullopt) {
  EmbeddingMatrix m = LoadEmbeddings(path, dim);
  return normalize ? NormalizeRows(m) : m;
}

PairedDataset LoadPair(const std::string& images, const std::string& texts,
                       bool normalize) {
  return PairedDataset(LoadRows(images, normalize), LoadRows(texts, normalize));
}

std::optional<fs::path> OptionalPath(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

// Prototypes for F_label / text assignment. Without a label bank the label
// term cannot be evaluated, so prototypes are zero rows.
EmbeddingMatrix LoadPrototypes(const std::string& labels,
                               const std::string& label_map,
                               std::size_t num_classes, std::size_t dim) {
  if (labels.empty()) return EmbeddingMatrix(num_classes, dim);
  EmbeddingMatrix prototypes =
      BuildPrototypes(LoadLabelBank(labels, OptionalPath(label_map)));
  if (prototypes.count() != num_classes) {
    throw Error(ErrorCode::kDimMismatch,
                "label bank has " + std::to_string(prototypes.count()) +
                    " labels but the partition has " +
                    std::to_string(num_classes) + " classes");
  }
  return prototypes;
}

ClassPartition LoadPartition(const PairedDataset& data,
                             const std::string& partition_path,
                             const std::string& labels,
                             const std::string& label_map) {
  ClassAssignment assignment = LoadAssignment(partition_path);
  EmbeddingMatrix prototypes =
      LoadPrototypes(labels, label_map, assignment.num_classes, data.dim());
  return BuildPartition(data, std::move(assignment.ids), prototypes);
}

json SpectralReport(const PairedDataset& data,
                    std::span<const std::uint32_t> image_classes,
                    std::span<const std::uint32_t> text_classes,
                    const std::optional<std::vector<std::size_t>>& subset,
                    CooccurrenceMode mode, std::size_t q,
                    std::optional<std::size_t> k) {
  const CooccurrenceMatrix co = BuildCooccurrence(data, mode);
  json out;
  out["sigmas"] = SingularSpectrum(co, std::min(q, data.size()));
  out["conductance"] = Conductance(co, image_classes, text_classes);
  out["labeling_error"] = LabelingError(image_classes, text_classes);
  if (subset && !subset->empty()) {
    const std::size_t kk = std::min(k.value_or(0), subset->size() - 1);
    const SpectrumGap gap = ComputeSpectrumGap(co, *subset, kk);
    out["sigma_gap"] = gap.gap;
    out["weyl_bound"] = gap.weyl_bound;
    out["sigma_index"] = kk + 1;
  } else {
    out["sigma_gap"] = nullptr;
    out["weyl_bound"] = nullptr;
    out["sigma_index"] = nullptr;
  }
  return out;
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
  std::string out_dir;
  std::string report;
  SyntheticConfig config;
};

int RunSynth(const SynthOptions& o, const CommonOptions& common,
             std::ostream& log) {
  Stopwatch watch;
  const SyntheticDataset ds = GenerateDataset(o.config);
  const fs::path dir(o.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + o.out_dir);
  SaveEmbeddings(ds.train.images, dir / "train_images.ccem");
  SaveEmbeddings(ds.train.texts, dir / "train_texts.ccem");
  SaveEmbeddings(ds.eval.images, dir / "eval_images.ccem");
  SaveEmbeddings(ds.eval.texts, dir / "eval_texts.ccem");
  SaveEmbeddings(ds.label_vectors, dir / "label_vectors.ccem");
  SaveEmbeddings(ds.train.proxy.images(), dir / "train_proxy_images.ccem");
  SaveEmbeddings(ds.train.proxy.texts(), dir / "train_proxy_texts.ccem");
  SaveEmbeddings(ds.anchors, dir / "proxy_labels.ccem");
  const auto k = static_cast<std::uint32_t>(o.config.num_classes);
  SaveAssignment({ds.train.classes, k}, dir / "train_classes.ccpa");
  SaveAssignment({ds.eval.classes, k}, dir / "eval_classes.ccpa");
  json sidecar;
  sidecar["labels"] = json::array();
  for (std::size_t c = 0; c < o.config.num_classes; ++c) {
    sidecar["labels"].push_back(
        {{"name", "class_" + std::to_string(c)}, {"begin", c}, {"end", c + 1}});
  }
  WriteTextFile(dir / "proxy_labels.json", sidecar.dump(2) + "\n");
  log << "[synth] train=" << ds.train.proxy.size()
      << " eval=" << ds.eval.proxy.size() << " classes=" << k << "\n";

  const SyntheticConfig& c = o.config;
  json report = BaseReport(
      "synth", {{"n", c.n},
                {"classes", c.num_classes},
                {"latent_dim", c.latent_dim},
                {"vision_dim", c.vision_dim},
                {"language_dim", c.language_dim},
                {"noise_v", c.noise_v},
                {"noise_l", c.noise_l},
                {"spread", c.within_class_spread},
                {"eval_fraction", c.eval_fraction},
                {"orthogonal_anchors", c.orthogonal_anchors},
                {"seed", c.seed}});
  report["n"] = ds.train.proxy.size();
  report["n_eval"] = ds.eval.proxy.size();
  report["k_classes"] = c.num_classes;
  report["wall_seconds"] = WallSeconds(watch, common);
  WriteReport(report, o.report.empty() ? (dir / "synth_report.json").string()
                                       : o.report);
  return 0;
}

// ------------------------------------------------------------ partition

struct PartitionOptions {
  std::string images;
  std::string texts;
  std::string labels;
  std::string label_map;
  std::string out;
  std::string report;
};

int RunPartition(const PartitionOptions& o, const CommonOptions& common,
                 std::ostream& log) {
  Stopwatch watch;
  const bool normalize = !common.no_normalize;
  EmbeddingMatrix images = LoadRows(o.images, normalize);
  EmbeddingMatrix texts =
      o.texts.empty() ? images : LoadRows(o.texts, normalize);
  const PairedDataset data(std::move(images), std::move(texts));
  const EmbeddingMatrix prototypes =
      BuildPrototypes(LoadLabelBank(o.labels, OptionalPath(o.label_map)));
  const ClassPartition partition = AssignClasses(data, prototypes);
  SaveAssignment(partition.ToAssignment(), o.out);
  const auto sizes = partition.class_sizes();
  const auto empty = std::count(sizes.begin(), sizes.end(), 0u);
  log << "[partition] n=" << data.size()
      << " classes=" << partition.num_classes() << " empty=" << empty << "\n";
  if (!o.report.empty()) {
    json report = BaseReport("partition", {{"images", o.images},
                                           {"texts", o.texts},
                                           {"labels", o.labels},
                                           {"label_map", o.label_map},
                                           {"out", o.out},
                                           {"normalize", normalize}});
    report["n"] = data.size();
    report["k_classes"] = partition.num_classes();
    report["class_sizes"] = sizes;
    report["wall_seconds"] = WallSeconds(watch, common);
    WriteReport(report, o.report);
  }
  return 0;
}

// --------------------------------------------------------------- select

struct SelectOptions {
  std::string images;
  std::string texts;
  std::string partition;
  std::string labels;
  std::string label_map;
  std::string out;
  std::string report;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  double alpha = 0.5;
  bool no_clamp = false;
  bool skip_double_greedy = false;
  bool stop_at_negative = false;
  bool no_class = false;
  bool no_self = false;
  bool no_label = false;
  bool no_reg = false;
  bool no_inter = false;
};

int RunSelect(const SelectOptions& o, const CommonOptions& common,
              std::ostream& log) {
  Stopwatch watch;
  if (o.labels.empty() && !o.no_label) {
    throw Usage("the label term needs label prototypes",
                "pass --labels <templates.ccem> or --no-label");
  }
  if (!(o.alpha >= 0.0)) {
    throw Usage("--alpha must be >= 0", "pass a non-negative --alpha");
  }
  const bool normalize = !common.no_normalize;
  const PairedDataset data = LoadPair(o.images, o.texts, normalize);
  if (o.budget > data.size()) {
    throw Usage("budget " + std::to_string(o.budget) + " exceeds the " +
                    std::to_string(data.size()) + " available examples",
                "pass --budget <= " + std::to_string(data.size()));
  }
  const ClassPartition partition =
      LoadPartition(data, o.partition, o.labels, o.label_map);
  ObjectiveConfig config;
  config.alpha = o.alpha;
  config.clamp_negative = !o.no_clamp;
  config.use_class = !o.no_class;
  config.use_self = !o.no_self;
  config.use_label = !o.no_label;
  config.use_reg = !o.no_reg;
  config.use_inter = !o.no_inter;
  const Objective objective(data, partition, config);
  ClipCovOptions options;
  options.double_greedy = !o.skip_double_greedy;
  options.greedy.stop_at_negative = o.stop_at_negative;
  ClipCovSelection selection = SelectClipCov(objective, o.budget, options);
  selection.result.seed = o.seed;
  log << "[select] greedy total=" << selection.greedy_total << "\n";
  if (options.double_greedy) {
    log << "[select] double greedy kept " << selection.result.indices.size()
        << " of " << std::min(o.budget, data.size())
        << ", total=" << selection.double_greedy_total << "\n";
  }

  json extra = BaseReport(
      "select", {{"images", o.images},
                 {"texts", o.texts},
                 {"partition", o.partition},
                 {"labels", o.labels},
                 {"label_map", o.label_map},
                 {"budget", o.budget},
                 {"seed", o.seed},
                 {"alpha", o.alpha},
                 {"clamp_negative", config.clamp_negative},
                 {"double_greedy", options.double_greedy},
                 {"stop_at_negative", o.stop_at_negative},
                 {"normalize", normalize},
                 {"terms",
                  {{"class", config.use_class},
                   {"self", config.use_self},
                   {"label", config.use_label},
                   {"reg", config.use_reg},
                   {"inter", config.use_inter}}}});
  extra["n"] = data.size();
  extra["k_classes"] = partition.num_classes();
  extra["phase_totals"] = {{"greedy", selection.greedy_total},
                           {"double_greedy", selection.double_greedy_total}};
  extra["wall_seconds"] = WallSeconds(watch, common);
  WriteSelection(selection.result, o.out, o.report, extra);
  return 0;
}

// ------------------------------------------------------------- baseline

struct BaselineOptions {
  std::string method;
  std::string images;
  std::string texts;
  std::string sim_pretrained;
  std::string sim_partial;
  std::string partition;
  std::string labels;
  std::string label_map;
  std::string out;
  std::string report;
  std::size_t budget = 0;
  std::size_t clusters = 0;
  std::uint64_t seed = 0;
  double alpha = 0.5;
};

std::vector<double> LoadColumn(const std::string& path) {
  const EmbeddingMatrix m = LoadEmbeddings(path, 1);
  return m.values();
}

int RunBaseline(const BaselineOptions& o, const CommonOptions& common,
                std::ostream& log) {
  Stopwatch watch;
  const bool normalize = !common.no_normalize;
  SelectionResult result;
  std::size_t n = 0;
  std::optional<PairedDataset> data;
  auto need = [&](const std::string& value, const std::string& flag) {
    if (value.empty()) {
      throw Usage("--method " + o.method + " needs " + flag,
                  "pass " + flag + " <file>");
    }
  };
  auto check_budget = [&](std::size_t count) {
    if (o.budget > count) {
      throw Usage("budget " + std::to_string(o.budget) + " exceeds the " +
                      std::to_string(count) + " available examples",
                  "pass --budget <= " + std::to_string(count));
    }
  };
  std::size_t clusters = o.clusters;
  if (o.method == "clip-score") {
    need(o.images, "--images");
    need(o.texts, "--texts");
    data = LoadPair(o.images, o.texts, normalize);
    n = data->size();
    check_budget(n);
    result = ClipScoreSelect(*data, o.budget);
  } else if (o.method == "random") {
    need(o.images, "--images");
    n = LoadEmbeddings(o.images).count();
    check_budget(n);
    result = RandomSelect(n, o.budget, o.seed);
  } else if (o.method == "semdedup") {
    need(o.images, "--images");
    const EmbeddingMatrix images = LoadRows(o.images, normalize);
    n = images.count();
    check_budget(n);
    if (clusters == 0) {
      clusters = static_cast<std::size_t>(
          std::ceil(std::sqrt(static_cast<double>(n))));
    }
    if (n > 0 && clusters > n) {
      throw Usage("--clusters exceeds the number of examples",
                  "pass --clusters <= " + std::to_string(n));
    }
    result = n == 0 ? MakeSelectionResult({}, 0)
                    : SemDeDupSelect(images, o.budget, clusters, o.seed);
  } else if (o.method == "crho") {
    need(o.sim_pretrained, "--sim-pretrained");
    need(o.sim_partial, "--sim-partial");
    const auto pre = LoadColumn(o.sim_pretrained);
    const auto partial = LoadColumn(o.sim_partial);
    n = pre.size();
    check_budget(n);
    result = CrhoSelect(pre, partial, o.budget);
  } else {
    throw Usage("unknown method \"" + o.method + "\"",
                "use clip-score, random, semdedup or crho");
  }
  result.seed = o.seed;
  bool evaluated = false;
  std::size_t k_classes = 0;
  if (!o.partition.empty()) {
    need(o.images, "--images");
    need(o.texts, "--texts");
    if (!data) data = LoadPair(o.images, o.texts, normalize);
    const ClassPartition partition =
        LoadPartition(*data, o.partition, o.labels, o.label_map);
    ObjectiveConfig config;
    config.alpha = o.alpha;
    config.use_label = !o.labels.empty();
    const Objective objective(*data, partition, config);
    result.objective = objective.Evaluate(result.selection_order);
    evaluated = true;
    k_classes = partition.num_classes();
  }
  log << "[baseline] " << o.method << " kept " << result.indices.size()
      << " of " << n << "\n";
  json extra = BaseReport("baseline", {{"method", o.method},
                                       {"images", o.images},
                                       {"texts", o.texts},
                                       {"sim_pretrained", o.sim_pretrained},
                                       {"sim_partial", o.sim_partial},
                                       {"partition", o.partition},
                                       {"labels", o.labels},
                                       {"budget", o.budget},
                                       {"clusters", clusters},
                                       {"seed", o.seed},
                                       {"normalize", normalize}});
  extra["n"] = n;
  extra["k_classes"] = k_classes;
  extra["objective_evaluated"] = evaluated;
  extra["wall_seconds"] = WallSeconds(watch, common);
  WriteSelection(result, o.out, o.report, extra);
  return 0;
}

// ------------------------------------------------------------- diagnose

struct DiagnoseOptions {
  std::string images;
  std::string texts;
  std::string partition;
  std::string text_partition;
  std::string labels;
  std::string label_map;
  std::string subset;
  std::string mode = "clamp";
  std::string report;
  std::size_t q = 10;
  std::optional<std::size_t> k;
};

CooccurrenceMode ParseMode(const std::string& mode) {
  if (mode == "clamp") return CooccurrenceMode::kClamp;
  if (mode == "shift") return CooccurrenceMode::kShift;
  throw Usage("unknown --mode \"" + mode + "\"", "use clamp or shift");
}

std::vector<std::uint32_t> TextClasses(const PairedDataset& data,
                                       const std::string& text_partition,
                                       const std::string& labels,
                                       const std::string& label_map) {
  if (!text_partition.empty()) return LoadAssignment(text_partition).ids;
  if (labels.empty()) {
    throw Usage("caption classes are needed for conductance",
                "pass --labels <templates.ccem> or --text-partition <ccpa>");
  }
  const EmbeddingMatrix prototypes =
      BuildPrototypes(LoadLabelBank(labels, OptionalPath(label_map)));
  return NearestPrototype(data.texts(), prototypes);
}

int RunDiagnose(const DiagnoseOptions& o, const CommonOptions& common,
                std::ostream& log) {
  Stopwatch watch;
  const bool normalize = !common.no_normalize;
  const PairedDataset data = LoadPair(o.images, o.texts, normalize);
  const std::vector<std::uint32_t> image_classes =
      LoadAssignment(o.partition).ids;
  const std::vector<std::uint32_t> text_classes =
      TextClasses(data, o.text_partition, o.labels, o.label_map);
  if (image_classes.size() != data.size() ||
      text_classes.size() != data.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "class files do not cover every example");
  }
  std::optional<std::vector<std::size_t>> subset;
  if (!o.subset.empty()) subset = ReadIndexFile(o.subset);
  const std::size_t k = o.k.value_or(
      std::max<std::size_t>(1, LoadAssignment(o.partition).num_classes) - 1);
  json spectral = SpectralReport(data, image_classes, text_classes, subset,
                                 ParseMode(o.mode), o.q, k);
  json report = BaseReport("diagnose", {{"images", o.images},
                                        {"texts", o.texts},
                                        {"partition", o.partition},
                                        {"text_partition", o.text_partition},
                                        {"labels", o.labels},
                                        {"subset", o.subset},
                                        {"mode", o.mode},
                                        {"q", o.q},
                                        {"k", k},
                                        {"normalize", normalize}});
  for (const auto& [key, value] : spectral.items()) report[key] = value;
  if (subset && !subset->empty()) {
    const CovarianceGap gap =
        CrossCovGap(ComputeCrossCovariance(data),
                    ComputeCrossCovariance(data, std::span(*subset)));
    report["cross_cov_gap_frobenius"] = gap.frobenius;
    report["cross_cov_gap_spectral"] = gap.spectral;
  } else {
    report["cross_cov_gap_frobenius"] = 0.0;
    report["cross_cov_gap_spectral"] = 0.0;
  }
  report["n"] = data.size();
  report["wall_seconds"] = WallSeconds(watch, common);
  log << "[diagnose] conductance=" << report["conductance"]
      << " labeling_error=" << report["labeling_error"] << "\n";
  WriteReport(report, o.report);
  return 0;
}

// ----------------------------------------------------------------- eval

struct EvalOptions {
  std::string train_images;
  std::string train_texts;
  std::string subset;
  std::string eval_images;
  std::string eval_classes;
  std::string label_vectors;
  std::string proxy_images;
  std::string proxy_texts;
  std::string partition;
  std::string labels;
  std::string label_map;
  std::string report;
  std::string mode = "clamp";
  double rho = 1.0;
  std::size_t rank = 0;
  std::size_t q = 10;
};

int RunEval(const EvalOptions& o, const CommonOptions& common,
            std::ostream& log) {
  Stopwatch watch;
  const EmbeddingMatrix train_images = LoadEmbeddings(o.train_images);
  const EmbeddingMatrix train_texts = LoadEmbeddings(o.train_texts);
  const std::vector<std::size_t> subset = ReadIndexFile(o.subset);
  if (subset.empty()) {
    throw Usage("the subset is empty", "evaluate a non-empty selection");
  }
  if (subset.back() >= train_images.count()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "subset index " + std::to_string(subset.back()) +
                    " outside the training set");
  }
  const CrossCovariance full =
      ComputeCrossCovariance(train_images, train_texts);
  const CrossCovariance sub =
      ComputeCrossCovariance(train_images, train_texts, std::span(subset));
  const CovarianceGap gap = CrossCovGap(full, sub);

  const EmbeddingMatrix eval_images = LoadEmbeddings(o.eval_images);
  const std::vector<std::uint32_t> eval_classes =
      LoadAssignment(o.eval_classes).ids;
  const EmbeddingMatrix label_vectors = LoadEmbeddings(o.label_vectors);
  const std::size_t rank = o.rank == 0 ? label_vectors.count() : o.rank;
  const double subset_accuracy =
      ZeroShotAccuracy(TrainLinearClip(sub.matrix, o.rho, rank), eval_images,
                       label_vectors, eval_classes);
  const double full_accuracy =
      ZeroShotAccuracy(TrainLinearClip(full.matrix, o.rho, rank), eval_images,
                       label_vectors, eval_classes);
  log << "[eval] gap_fro=" << gap.frobenius << " zero_shot=" << subset_accuracy
      << " (full data " << full_accuracy << ")\n";

  json report = BaseReport("eval", {{"train_images", o.train_images},
                                    {"train_texts", o.train_texts},
                                    {"subset", o.subset},
                                    {"eval_images", o.eval_images},
                                    {"eval_classes", o.eval_classes},
                                    {"label_vectors", o.label_vectors},
                                    {"rho", o.rho},
                                    {"rank", rank}});
  report["n"] = train_images.count();
  report["subset_size"] = subset.size();
  report["cross_cov_gap_frobenius"] = gap.frobenius;
  report["cross_cov_gap_spectral"] = gap.spectral;
  report["zero_shot_accuracy"] = subset_accuracy;
  report["full_data_zero_shot_accuracy"] = full_accuracy;
  if (!o.proxy_images.empty()) {
    if (o.proxy_texts.empty() || o.partition.empty() || o.labels.empty()) {
      throw Usage("the spectral report needs proxy texts, partition and labels",
                  "pass --proxy-texts, --partition and --labels");
    }
    const PairedDataset proxy =
        LoadPair(o.proxy_images, o.proxy_texts, !common.no_normalize);
    const auto image_classes = LoadAssignment(o.partition).ids;
    const auto text_classes = TextClasses(proxy, "", o.labels, o.label_map);
    const std::size_t k = std::max<std::size_t>(1, label_vectors.count()) - 1;
    report["spectral"] =
        SpectralReport(proxy, image_classes, text_classes, subset,
                       ParseMode(o.mode), o.q, k);
  } else {
    report["spectral"] = nullptr;
  }
  report["wall_seconds"] = WallSeconds(watch, common);
  WriteReport(report, o.report);
  return 0;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& log) {
  CLI::App app{"Generalizable subset selection for image-caption embeddings",
               "clipcov"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  CommonOptions common;
  std::function<int()> action;

  auto add_common = [&](CLI::App* sub, bool with_normalize) {
    sub->add_flag("--reproducible", common.reproducible,
                  "Write wall_seconds = 0 so reports are byte-comparable");
    if (with_normalize) {
      sub->add_flag("--no-normalize", common.no_normalize,
                    "Use raw rows instead of unit-normalized ones");
    }
  };

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth_cmd->add_option("--out-dir", synth.out_dir)->required();
  synth_cmd->add_option("--report", synth.report);
  synth_cmd->add_option("--n", synth.config.n, "Examples (train + eval)");
  synth_cmd->add_option("--classes", synth.config.num_classes);
  synth_cmd->add_option("--latent-dim", synth.config.latent_dim);
  synth_cmd->add_option("--vision-dim", synth.config.vision_dim);
  synth_cmd->add_option("--language-dim", synth.config.language_dim);
  synth_cmd->add_option("--noise-v", synth.config.noise_v);
  synth_cmd->add_option("--noise-l", synth.config.noise_l);
  synth_cmd->add_option("--spread", synth.config.within_class_spread);
  synth_cmd->add_option("--eval-fraction", synth.config.eval_fraction);
  synth_cmd->add_option("--seed", synth.config.seed);
  synth_cmd->add_flag("--orthogonal-anchors", synth.config.orthogonal_anchors);
  add_common(synth_cmd, false);
  synth_cmd->callback([&] { action = [&] { return RunSynth(synth, common, log); }; });

  PartitionOptions part;
  auto* part_cmd = app.add_subcommand(
      "partition", "Assign images to the nearest label prototype (CCPA)");
  part_cmd->add_option("--images", part.images)->required();
  part_cmd->add_option("--texts", part.texts,
                       "Optional; only used to validate alignment");
  part_cmd->add_option("--labels", part.labels, "Template embeddings (CCEM)")
      ->required();
  part_cmd->add_option("--label-map", part.label_map,
                       "Sidecar JSON grouping template rows into labels");
  part_cmd->add_option("--out", part.out)->required();
  part_cmd->add_option("--report", part.report);
  add_common(part_cmd, true);
  part_cmd->callback([&] { action = [&] { return RunPartition(part, common, log); }; });

  SelectOptions sel;
  auto* sel_cmd = app.add_subcommand("select", "Select a ClipCov subset");
  sel_cmd->add_option("--images", sel.images)->required();
  sel_cmd->add_option("--texts", sel.texts)->required();
  sel_cmd->add_option("--partition", sel.partition, "CCPA class file")
      ->required();
  sel_cmd->add_option("--labels", sel.labels, "Template embeddings (CCEM)");
  sel_cmd->add_option("--label-map", sel.label_map);
  sel_cmd->add_option("--budget", sel.budget)->required();
  sel_cmd->add_option("--alpha", sel.alpha, "Label-term weight");
  sel_cmd->add_option("--seed", sel.seed, "Recorded in the report");
  sel_cmd->add_flag("--no-clamp", sel.no_clamp);
  sel_cmd->add_flag("--skip-double-greedy", sel.skip_double_greedy);
  sel_cmd->add_flag("--stop-at-negative", sel.stop_at_negative);
  sel_cmd->add_flag("--no-class", sel.no_class);
  sel_cmd->add_flag("--no-self", sel.no_self);
  sel_cmd->add_flag("--no-label", sel.no_label);
  sel_cmd->add_flag("--no-reg", sel.no_reg);
  sel_cmd->add_flag("--no-inter", sel.no_inter);
  sel_cmd->add_option("--out", sel.out, "Index file")->required();
  sel_cmd->add_option("--report", sel.report)->required();
  add_common(sel_cmd, true);
  sel_cmd->callback([&] { action = [&] { return RunSelect(sel, common, log); }; });

  BaselineOptions base;
  auto* base_cmd = app.add_subcommand("baseline", "Run a comparison selector");
  base_cmd->add_option("--method", base.method)
      ->required()
      ->check(CLI::IsMember({"clip-score", "random", "semdedup", "crho"}));
  base_cmd->add_option("--images", base.images);
  base_cmd->add_option("--texts", base.texts);
  base_cmd->add_option("--sim-pretrained", base.sim_pretrained,
                       "CCEM dim=1: similarities from the pretrained model");
  base_cmd->add_option("--sim-partial", base.sim_partial,
                       "CCEM dim=1: similarities from a partially trained "
                       "model (computed upstream)");
  base_cmd->add_option("--partition", base.partition,
                       "Optional: evaluate the ClipCov objective on the result");
  base_cmd->add_option("--labels", base.labels);
  base_cmd->add_option("--label-map", base.label_map);
  base_cmd->add_option("--alpha", base.alpha);
  base_cmd->add_option("--budget", base.budget)->required();
  base_cmd->add_option("--clusters", base.clusters,
                       "SemDeDup clusters (default ceil(sqrt(n)))");
  base_cmd->add_option("--seed", base.seed);
  base_cmd->add_option("--out", base.out)->required();
  base_cmd->add_option("--report", base.report)->required();
  add_common(base_cmd, true);
  base_cmd->callback([&] { action = [&] { return RunBaseline(base, common, log); }; });

  DiagnoseOptions diag;
  std::size_t diag_k = 0;
  auto* diag_cmd =
      app.add_subcommand("diagnose", "Spectral and covariance diagnostics");
  diag_cmd->add_option("--images", diag.images)->required();
  diag_cmd->add_option("--texts", diag.texts)->required();
  diag_cmd->add_option("--partition", diag.partition, "Image classes (CCPA)")
      ->required();
  diag_cmd->add_option("--text-partition", diag.text_partition);
  diag_cmd->add_option("--labels", diag.labels);
  diag_cmd->add_option("--label-map", diag.label_map);
  diag_cmd->add_option("--subset", diag.subset, "Selection index file");
  diag_cmd->add_option("--mode", diag.mode)->check(
      CLI::IsMember({"clamp", "shift"}));
  diag_cmd->add_option("--q", diag.q, "Leading singular values to report");
  auto* k_opt = diag_cmd->add_option(
      "--k", diag_k, "One-based index of the compared singular value minus 1");
  diag_cmd->add_option("--report", diag.report)->required();
  add_common(diag_cmd, true);
  diag_cmd->callback([&] {
    if (k_opt->count() > 0) diag.k = diag_k;
    action = [&] { return RunDiagnose(diag, common, log); };
  });

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand(
      "eval", "Cross-covariance gap and linear zero-shot accuracy of a subset");
  eval_cmd->add_option("--train-images", ev.train_images)->required();
  eval_cmd->add_option("--train-texts", ev.train_texts)->required();
  eval_cmd->add_option("--subset", ev.subset)->required();
  eval_cmd->add_option("--eval-images", ev.eval_images)->required();
  eval_cmd->add_option("--eval-classes", ev.eval_classes)->required();
  eval_cmd->add_option("--label-vectors", ev.label_vectors)->required();
  eval_cmd->add_option("--rho", ev.rho);
  eval_cmd->add_option("--rank", ev.rank,
                       "Encoder rank (default: number of labels)");
  eval_cmd->add_option("--proxy-images", ev.proxy_images);
  eval_cmd->add_option("--proxy-texts", ev.proxy_texts);
  eval_cmd->add_option("--partition", ev.partition);
  eval_cmd->add_option("--labels", ev.labels);
  eval_cmd->add_option("--label-map", ev.label_map);
  eval_cmd->add_option("--mode", ev.mode)->check(
      CLI::IsMember({"clamp", "shift"}));
  eval_cmd->add_option("--q", ev.q);
  eval_cmd->add_option("--report", ev.report)->required();
  add_common(eval_cmd, true);
  eval_cmd->callback([&] { action = [&] { return RunEval(ev, common, log); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, log);
    return code == 0 ? 0 : 2;
  }
  try {
    return action();
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return IsInputError(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    log << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace clipcov
