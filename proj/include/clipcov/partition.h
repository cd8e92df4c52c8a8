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

#ifndef CLIPCOV_PARTITION_H_
#define CLIPCOV_PARTITION_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "clipcov/embedding_io.h"

namespace clipcov {

// Text templates per label (e.g. "a photo of a {label}"), already embedded.
struct LabelBank {
  EmbeddingMatrix templates;              // unit rows
  std::vector<std::size_t> label_of_row;  // template row -> label id
  std::vector<std::string> names;         // empty or one per label
  std::size_t num_labels = 0;
};

// Normalizes the template rows and checks every label owns a template.
LabelBank MakeLabelBank(const EmbeddingMatrix& templates,
                        std::vector<std::size_t> label_of_row,
                        std::size_t num_labels,
                        std::vector<std::string> names = {});

// Template rows from a CCEM file. The optional sidecar JSON groups rows:
//   {"labels": [{"name": "dog", "begin": 0, "end": 3}, ...]}
// with [begin, end) ranges tiling all rows. Without it, each row is a label.
LabelBank LoadLabelBank(const std::filesystem::path& templates_path,
                        const std::optional<std::filesystem::path>& sidecar);

// Mean of each label's templates, renormalized. kZeroRow when the mean
// vanishes (antipodal templates).
EmbeddingMatrix BuildPrototypes(const LabelBank& bank);

// Latent class approximation: which examples share a class, plus the
// per-class statistics the objective needs.
struct ClassPartition {
  std::vector<std::uint32_t> assignment;
  std::vector<std::vector<std::size_t>> members;  // ascending per class
  EmbeddingMatrix prototypes;                     // K x r unit rows
  EmbeddingMatrix class_image_mean;               // K x r, zero if empty
  EmbeddingMatrix class_text_mean;

  std::size_t num_classes() const { return members.size(); }
  std::size_t size() const { return assignment.size(); }
  std::size_t class_size(std::size_t k) const { return members[k].size(); }
  std::vector<std::size_t> class_sizes() const;
  ClassAssignment ToAssignment() const;
};

// argmax_k <row_i, prototype_k>, lowest k on ties.
std::vector<std::uint32_t> NearestPrototype(const EmbeddingMatrix& rows,
                                            const EmbeddingMatrix& prototypes);

// Zero-shot partition of the image side; captions inherit the class of their
// pair.
ClassPartition AssignClasses(const PairedDataset& data,
                             const EmbeddingMatrix& prototypes);

// Rebuilds members and class means from a stored assignment.
ClassPartition BuildPartition(const PairedDataset& data,
                              std::vector<std::uint32_t> assignment,
                              const EmbeddingMatrix& prototypes);

}  // namespace clipcov

#endif  // CLIPCOV_PARTITION_H_
