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

#include <string>
#include <utility>

#include "clipcov/error.h"
#include "clipcov/parallel.h"
#include "json.hpp"

namespace clipcov {

LabelBank MakeLabelBank(const EmbeddingMatrix& templates,
                        std::vector<std::size_t> label_of_row,
                        std::size_t num_labels,
                        std::vector<std::string> names) {
  if (num_labels == 0) {
    throw Error(ErrorCode::kInvalidConfig, "label bank needs at least 1 label");
  }
  if (label_of_row.size() != templates.count()) {
    throw Error(ErrorCode::kLengthMismatch,
                "label_of_row has " + std::to_string(label_of_row.size()) +
                    " entries for " + std::to_string(templates.count()) +
                    " templates");
  }
  if (!names.empty() && names.size() != num_labels) {
    throw Error(ErrorCode::kLengthMismatch, "one name per label required");
  }
  std::vector<bool> seen(num_labels, false);
  for (std::size_t label : label_of_row) {
    if (label >= num_labels) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "template label " + std::to_string(label));
    }
    seen[label] = true;
  }
  for (std::size_t k = 0; k < num_labels; ++k) {
    if (!seen[k]) {
      throw Error(ErrorCode::kInvalidConfig,
                  "label " + std::to_string(k) + " has no template");
    }
  }
  LabelBank bank;
  bank.templates = NormalizeRows(templates);
  bank.label_of_row = std::move(label_of_row);
  bank.names = std::move(names);
  bank.num_labels = num_labels;
  return bank;
}

LabelBank LoadLabelBank(const std::filesystem::path& templates_path,
                        const std::optional<std::filesystem::path>& sidecar) {
  EmbeddingMatrix templates = LoadEmbeddings(templates_path);
  std::vector<std::size_t> label_of_row(templates.count());
  std::vector<std::string> names;
  if (!sidecar) {
    for (std::size_t i = 0; i < label_of_row.size(); ++i) label_of_row[i] = i;
    return MakeLabelBank(templates, std::move(label_of_row), templates.count());
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(ReadTextFile(*sidecar));
    std::size_t next = 0;
    const auto& labels = doc.at("labels");
    for (std::size_t k = 0; k < labels.size(); ++k) {
      const auto begin = labels[k].at("begin").get<std::size_t>();
      const auto end = labels[k].at("end").get<std::size_t>();
      if (begin != next || end <= begin || end > templates.count()) {
        throw Error(ErrorCode::kBadFormat,
                    sidecar->string() + ": label " + std::to_string(k) +
                        " range does not continue the tiling");
      }
      for (std::size_t i = begin; i < end; ++i) label_of_row[i] = k;
      names.push_back(labels[k].value("name", std::to_string(k)));
      next = end;
    }
    if (next != templates.count()) {
      throw Error(ErrorCode::kBadFormat,
                  sidecar->string() + ": ranges do not cover every template");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBadFormat, sidecar->string() + ": " + e.what());
  }
  const std::size_t num_labels = names.size();
  return MakeLabelBank(templates, std::move(label_of_row), num_labels,
                       std::move(names));
}

EmbeddingMatrix BuildPrototypes(const LabelBank& bank) {
  const std::size_t dim = bank.templates.dim();
  std::vector<double> sums(bank.num_labels * dim, 0.0);
  std::vector<std::size_t> counts(bank.num_labels, 0);
  for (std::size_t i = 0; i < bank.templates.count(); ++i) {
    const std::size_t k = bank.label_of_row[i];
    auto row = bank.templates.row(i);
    for (std::size_t j = 0; j < dim; ++j) sums[k * dim + j] += row[j];
    ++counts[k];
  }
  for (std::size_t k = 0; k < bank.num_labels; ++k) {
    for (std::size_t j = 0; j < dim; ++j) {
      sums[k * dim + j] /= static_cast<double>(counts[k]);
    }
  }
  EmbeddingMatrix means(bank.num_labels, dim, std::move(sums));
  return NormalizeRows(means);
}

std::vector<std::size_t> ClassPartition::class_sizes() const {
  std::vector<std::size_t> sizes(members.size());
  for (std::size_t k = 0; k < members.size(); ++k) sizes[k] = members[k].size();
  return sizes;
}

ClassAssignment ClassPartition::ToAssignment() const {
  return {assignment, static_cast<std::uint32_t>(num_classes())};
}

std::vector<std::uint32_t> NearestPrototype(const EmbeddingMatrix& rows,
                                            const EmbeddingMatrix& prototypes) {
  if (rows.dim() != prototypes.dim()) {
    throw Error(ErrorCode::kDimMismatch,
                "rows have dim " + std::to_string(rows.dim()) +
                    ", prototypes " + std::to_string(prototypes.dim()));
  }
  if (prototypes.count() == 0) {
    throw Error(ErrorCode::kInvalidConfig, "no prototypes");
  }
  std::vector<std::uint32_t> out(rows.count());
  ParallelFor(rows.count(), [&](std::size_t i) {
    std::uint32_t best = 0;
    double best_score = Dot(rows.row(i), prototypes.row(0));
    for (std::size_t k = 1; k < prototypes.count(); ++k) {
      const double score = Dot(rows.row(i), prototypes.row(k));
      if (score > best_score) {
        best_score = score;
        best = static_cast<std::uint32_t>(k);
      }
    }
    out[i] = best;
  });
  return out;
}

ClassPartition BuildPartition(const PairedDataset& data,
                              std::vector<std::uint32_t> assignment,
                              const EmbeddingMatrix& prototypes) {
  if (assignment.size() != data.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "assignment covers " + std::to_string(assignment.size()) +
                    " examples, dataset has " + std::to_string(data.size()));
  }
  if (prototypes.dim() != data.dim()) {
    throw Error(ErrorCode::kDimMismatch, "prototype dim differs from data");
  }
  const std::size_t num_classes = prototypes.count();
  const std::size_t dim = data.dim();
  ClassPartition p;
  p.members.resize(num_classes);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] >= num_classes) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "class id " + std::to_string(assignment[i]) + " at row " +
                      std::to_string(i));
    }
    p.members[assignment[i]].push_back(i);
  }
  // Sequential ascending-index sums keep the means bit-reproducible.
  std::vector<double> image_mean(num_classes * dim, 0.0);
  std::vector<double> text_mean(num_classes * dim, 0.0);
  for (std::size_t k = 0; k < num_classes; ++k) {
    if (p.members[k].empty()) continue;
    double* im = &image_mean[k * dim];
    double* tm = &text_mean[k * dim];
    for (std::size_t i : p.members[k]) {
      auto v = data.images().row(i);
      auto t = data.texts().row(i);
      for (std::size_t j = 0; j < dim; ++j) {
        im[j] += v[j];
        tm[j] += t[j];
      }
    }
    const double size = static_cast<double>(p.members[k].size());
    for (std::size_t j = 0; j < dim; ++j) {
      im[j] /= size;
      tm[j] /= size;
    }
  }
  p.assignment = std::move(assignment);
  p.prototypes = prototypes;
  p.class_image_mean = EmbeddingMatrix(num_classes, dim, std::move(image_mean));
  p.class_text_mean = EmbeddingMatrix(num_classes, dim, std::move(text_mean));
  return p;
}

ClassPartition AssignClasses(const PairedDataset& data,
                             const EmbeddingMatrix& prototypes) {
  return BuildPartition(data, NearestPrototype(data.images(), prototypes),
                        prototypes);
}

}  // namespace clipcov
