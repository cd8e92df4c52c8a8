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

#ifndef CLIPCOV_DIAGNOSTICS_H_
#define CLIPCOV_DIAGNOSTICS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "clipcov/embedding_io.h"

namespace clipcov {

// Centered image/caption cross-covariance with a 1/n divisor:
//   C = 1/n sum_i (v_i - mu_v)(t_i - mu_l)^T.
struct CrossCovariance {
  Eigen::MatrixXd matrix;  // d_v x d_l
  Eigen::VectorXd mu_v;
  Eigen::VectorXd mu_l;
  std::size_t n_used = 0;
};

// Over all rows, or over `subset` when given (kEmptySubset if it is empty).
CrossCovariance ComputeCrossCovariance(
    const EmbeddingMatrix& images, const EmbeddingMatrix& texts,
    std::optional<std::span<const std::size_t>> subset = std::nullopt);
CrossCovariance ComputeCrossCovariance(
    const PairedDataset& data,
    std::optional<std::span<const std::size_t>> subset = std::nullopt);

struct CovarianceGap {
  double frobenius = 0.0;
  double spectral = 0.0;
};

// Norms of full.matrix - sub.matrix. kDimMismatch on shape mismatch.
CovarianceGap CrossCovGap(const CrossCovariance& full,
                          const CrossCovariance& sub);

// Largest singular value by power iteration on M^T M (relative tolerance
// 1e-10, at most 10000 iterations, fixed start vector).
double SpectralNorm(const Eigen::MatrixXd& m);

enum class CooccurrenceMode {
  kClamp,  // a_ij = max(<v_i, t_j>, 0)
  kShift,  // a_ij = (<v_i, t_j> + 2) / 4
};

// Joint pairing distribution A (entries sum to 1), its marginals, and
// A~_ij = A_ij / sqrt(P_V(i) P_L(j)) (0 where a marginal vanishes).
struct CooccurrenceMatrix {
  Eigen::MatrixXd a;
  Eigen::VectorXd row_marginals;
  Eigen::VectorXd col_marginals;
  Eigen::MatrixXd a_tilde;
};

inline constexpr std::size_t kMaxDenseExamples = 20000;

// kTooLarge above kMaxDenseExamples; kAllZero when nothing survives clamping.
CooccurrenceMatrix BuildCooccurrence(const PairedDataset& data,
                                     CooccurrenceMode mode);

// Derives marginals and A~ from an already normalized joint matrix.
CooccurrenceMatrix CooccurrenceFromJoint(Eigen::MatrixXd joint);

// The q largest singular values, non-increasing. Full SVD up to 2000 rows or
// columns, subspace iteration beyond.
std::vector<double> SingularSpectrum(const Eigen::MatrixXd& m, std::size_t q);
std::vector<double> SingularSpectrum(const CooccurrenceMatrix& co,
                                     std::size_t q);

// Pairing mass on entries whose image and caption classes differ.
double Conductance(const CooccurrenceMatrix& co,
                   std::span<const std::uint32_t> image_classes,
                   std::span<const std::uint32_t> text_classes);

// Fraction of pairs whose image and caption classes differ.
double LabelingError(std::span<const std::uint32_t> image_classes,
                     std::span<const std::uint32_t> text_classes);

struct SpectrumGap {
  double gap = 0.0;         // |sigma_{k+1}(A~) - sigma_{k+1}(A~_S)|
  double weyl_bound = 0.0;  // ||A~ - A~_S||_2
};

// A~_S keeps the rows and columns of A~ indexed by S and zeroes the rest.
// `k` is zero-based here: sigma_{k+1} is the (k+1)-th largest. Requires
// k + 1 <= |S| (kBudgetTooSmall).
SpectrumGap ComputeSpectrumGap(const CooccurrenceMatrix& co,
                               std::span<const std::size_t> subset,
                               std::size_t k);

// Closed-form minimizer of the linear contrastive loss
//   L(F_V, F_L) = -Tr(F_V C F_L^T) + rho/2 ||F_V^T F_L||_F^2
// over encoders of rank `rank`: M = F_V^T F_L is the best rank-`rank`
// approximation of C, scaled by 1/rho.
struct EncoderProduct {
  Eigen::MatrixXd m;                // d_v x d_l
  Eigen::MatrixXd vision_factor;    // F_V, rank x d_v
  Eigen::MatrixXd language_factor;  // F_L, rank x d_l
  double rho = 1.0;
  std::size_t rank = 0;
};

EncoderProduct TrainLinearClip(const Eigen::MatrixXd& cross_covariance,
                               double rho, std::size_t rank);

double LinearClipLoss(const Eigen::MatrixXd& vision_factor,
                      const Eigen::MatrixXd& language_factor,
                      const Eigen::MatrixXd& cross_covariance, double rho);

// Fraction of images whose argmax_k x^T M y_k equals the true class; lowest
// k wins ties.
double ZeroShotAccuracy(const EncoderProduct& model,
                        const EmbeddingMatrix& eval_images,
                        const EmbeddingMatrix& label_vectors,
                        std::span<const std::uint32_t> true_classes);

Eigen::MatrixXd ToEigen(const EmbeddingMatrix& m);

}  // namespace clipcov

#endif  // CLIPCOV_DIAGNOSTICS_H_
