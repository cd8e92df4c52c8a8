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

#ifndef CLIPCOV_BASELINES_H_
#define CLIPCOV_BASELINES_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "clipcov/embedding_io.h"

namespace clipcov {

// Keeps the `budget` pairs with the largest <v_i, t_i>.
SelectionResult ClipScoreSelect(const PairedDataset& data, std::size_t budget);

// Uniform without replacement (partial Fisher-Yates on std::mt19937_64).
SelectionResult RandomSelect(std::size_t n, std::size_t budget,
                             std::uint64_t seed);

// Seeded k-means++ initialization followed by a fixed number of Lloyd
// iterations. Returns the cluster of every row.
std::vector<std::size_t> KMeans(const EmbeddingMatrix& rows,
                                std::size_t num_clusters, std::uint64_t seed,
                                std::size_t iterations = 25);

// Semantic deduplication with an exact budget: rows are clustered, each
// member is scored by its largest cosine similarity to another kept member
// of its cluster (bit-identical rows score 2), and the most redundant member
// is dropped repeatedly until `budget` remain. Ties drop the highest index.
SelectionResult SemDeDupSelect(const EmbeddingMatrix& images,
                               std::size_t budget, std::size_t num_clusters,
                               std::uint64_t seed);

// Keeps the `budget` pairs with the largest sim_pretrained - sim_partial.
SelectionResult CrhoSelect(std::span<const double> sim_pretrained,
                           std::span<const double> sim_partial,
                           std::size_t budget);

// Indices of the `budget` largest scores, lowest index on ties, in rank
// order.
std::vector<std::size_t> TopByScore(std::span<const double> scores,
                                    std::size_t budget);

}  // namespace clipcov

#endif  // CLIPCOV_BASELINES_H_
