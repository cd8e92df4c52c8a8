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

#ifndef CLIPCOV_SYNTH_H_
#define CLIPCOV_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "clipcov/embedding_io.h"

namespace clipcov {

// Paired data with a shared underlying feature per example:
//   x_v = T_V u_v,  x_l = T_L u_l,  u_m = P(z + xi_m),  z = a_y + jitter,
// where a_y is the anchor of latent class y, P rescales onto the unit ball
// and T_V, T_L have orthonormal columns.
struct SyntheticConfig {
  std::size_t n = 1000;  // train + eval
  std::size_t num_classes = 10;
  std::size_t latent_dim = 16;
  std::size_t vision_dim = 32;
  std::size_t language_dim = 32;
  double noise_v = 0.3;
  double noise_l = 0.3;
  double within_class_spread = 0.2;
  double eval_fraction = 0.2;
  std::uint64_t seed = 0;
  // Gram-Schmidt the anchors (requires num_classes <= latent_dim).
  bool orthogonal_anchors = false;
  // Class probabilities; uniform when empty.
  std::vector<double> class_proportions;
};

// Throws kInvalidConfig on violated invariants.
void ValidateConfig(const SyntheticConfig& config);

struct SyntheticSplit {
  EmbeddingMatrix images;  // x_v, n x d_v
  EmbeddingMatrix texts;   // x_l, n x d_l
  PairedDataset proxy;     // u_v, u_l: what a perfectly trained encoder recovers
  std::vector<std::uint32_t> classes;
};

struct SyntheticDataset {
  SyntheticSplit train;
  SyntheticSplit eval;
  EmbeddingMatrix anchors;        // K x d, unit rows (proxy-space labels)
  EmbeddingMatrix label_vectors;  // K x d_l, T_L a_k
  Eigen::MatrixXd vision_map;     // T_V
  Eigen::MatrixXd language_map;   // T_L
};

SyntheticDataset GenerateDataset(const SyntheticConfig& config);

}  // namespace clipcov

#endif  // CLIPCOV_SYNTH_H_
