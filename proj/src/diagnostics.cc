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

#include "clipcov/diagnostics.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "clipcov/error.h"

namespace clipcov {
namespace {

constexpr double kPowerTolerance = 1e-10;
constexpr int kPowerMaxIterations = 10000;
constexpr std::size_t kFullSvdLimit = 2000;

Eigen::VectorXd StartVector(Eigen::Index n, std::uint64_t salt) {
  std::mt19937_64 rng(0x5eedULL ^ salt);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v.normalized();
}

void CheckClasses(std::span<const std::uint32_t> a,
                  std::span<const std::uint32_t> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "class arrays have lengths " + std::to_string(a.size()) +
                    " and " + std::to_string(b.size()));
  }
}

}  // namespace

Eigen::MatrixXd ToEigen(const EmbeddingMatrix& m) {
  Eigen::MatrixXd out(m.count(), m.dim());
  for (std::size_t i = 0; i < m.count(); ++i) {
    for (std::size_t j = 0; j < m.dim(); ++j) out(i, j) = m(i, j);
  }
  return out;
}

CrossCovariance ComputeCrossCovariance(
    const EmbeddingMatrix& images, const EmbeddingMatrix& texts,
    std::optional<std::span<const std::size_t>> subset) {
  if (images.count() != texts.count()) {
    throw Error(ErrorCode::kDimMismatch, "image/text counts differ");
  }
  std::vector<std::size_t> rows;
  if (subset) {
    rows.assign(subset->begin(), subset->end());
  } else {
    rows.resize(images.count());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  }
  if (rows.empty()) throw Error(ErrorCode::kEmptySubset, "no rows to average");
  const auto dv = static_cast<Eigen::Index>(images.dim());
  const auto dl = static_cast<Eigen::Index>(texts.dim());
  CrossCovariance out;
  out.n_used = rows.size();
  out.mu_v = Eigen::VectorXd::Zero(dv);
  out.mu_l = Eigen::VectorXd::Zero(dl);
  for (std::size_t i : rows) {
    if (i >= images.count()) {
      throw Error(ErrorCode::kIndexOutOfRange, std::to_string(i));
    }
    for (Eigen::Index j = 0; j < dv; ++j) out.mu_v(j) += images(i, j);
    for (Eigen::Index j = 0; j < dl; ++j) out.mu_l(j) += texts(i, j);
  }
  const double n = static_cast<double>(rows.size());
  out.mu_v /= n;
  out.mu_l /= n;
  out.matrix = Eigen::MatrixXd::Zero(dv, dl);
  Eigen::VectorXd dv_vec(dv);
  Eigen::VectorXd dl_vec(dl);
  for (std::size_t i : rows) {
    for (Eigen::Index j = 0; j < dv; ++j) dv_vec(j) = images(i, j) - out.mu_v(j);
    for (Eigen::Index j = 0; j < dl; ++j) dl_vec(j) = texts(i, j) - out.mu_l(j);
    out.matrix.noalias() += dv_vec * dl_vec.transpose();
  }
  out.matrix /= n;
  return out;
}

CrossCovariance ComputeCrossCovariance(
    const PairedDataset& data,
    std::optional<std::span<const std::size_t>> subset) {
  return ComputeCrossCovariance(data.images(), data.texts(), subset);
}

double SpectralNorm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::VectorXd v = StartVector(m.cols(), 0);
  double sigma = (m * v).norm();
  for (int iter = 0; iter < kPowerMaxIterations; ++iter) {
    Eigen::VectorXd w = m.transpose() * (m * v);
    const double w_norm = w.norm();
    if (w_norm == 0.0) return 0.0;
    v = w / w_norm;
    const double next = (m * v).norm();
    const bool done = std::abs(next - sigma) <= kPowerTolerance * next;
    sigma = next;
    if (done) break;
  }
  return sigma;
}

CovarianceGap CrossCovGap(const CrossCovariance& full,
                          const CrossCovariance& sub) {
  if (full.matrix.rows() != sub.matrix.rows() ||
      full.matrix.cols() != sub.matrix.cols()) {
    throw Error(ErrorCode::kDimMismatch, "cross-covariance shapes differ");
  }
  const Eigen::MatrixXd diff = full.matrix - sub.matrix;
  return {diff.norm(), SpectralNorm(diff)};
}

CooccurrenceMatrix CooccurrenceFromJoint(Eigen::MatrixXd joint) {
  CooccurrenceMatrix co;
  co.row_marginals = joint.rowwise().sum();
  co.col_marginals = joint.colwise().sum().transpose();
  co.a_tilde = Eigen::MatrixXd::Zero(joint.rows(), joint.cols());
  for (Eigen::Index j = 0; j < joint.cols(); ++j) {
    const double pl = co.col_marginals(j);
    if (pl <= 0.0) continue;
    for (Eigen::Index i = 0; i < joint.rows(); ++i) {
      const double pv = co.row_marginals(i);
      if (pv <= 0.0) continue;
      co.a_tilde(i, j) = joint(i, j) / std::sqrt(pv * pl);
    }
  }
  co.a = std::move(joint);
  return co;
}

CooccurrenceMatrix BuildCooccurrence(const PairedDataset& data,
                                     CooccurrenceMode mode) {
  const std::size_t n = data.size();
  if (n > kMaxDenseExamples) {
    throw Error(ErrorCode::kTooLarge,
                "dense co-occurrence limited to " +
                    std::to_string(kMaxDenseExamples) + " examples, got " +
                    std::to_string(n));
  }
  if (n == 0) throw Error(ErrorCode::kAllZero, "empty dataset");
  Eigen::MatrixXd a = ToEigen(data.images()) * ToEigen(data.texts()).transpose();
  if (mode == CooccurrenceMode::kClamp) {
    a = a.cwiseMax(0.0);
  } else {
    a = (a.array() + 2.0) / 4.0;
  }
  const double total = a.sum();
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kAllZero, "every pairing weight is zero");
  }
  a /= total;
  return CooccurrenceFromJoint(std::move(a));
}

std::vector<double> SingularSpectrum(const Eigen::MatrixXd& m, std::size_t q) {
  const auto min_dim = static_cast<std::size_t>(std::min(m.rows(), m.cols()));
  if (q > min_dim) {
    throw Error(ErrorCode::kInvalidConfig,
                "requested " + std::to_string(q) + " singular values of a " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                    " matrix");
  }
  if (q == 0) return {};
  Eigen::VectorXd values;
  if (static_cast<std::size_t>(std::max(m.rows(), m.cols())) <= kFullSvdLimit) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    values = svd.singularValues();
  } else {
    // Orthogonal (subspace) iteration on M^T M with a few guard vectors.
    const Eigen::Index block =
        static_cast<Eigen::Index>(std::min(min_dim, q + 8));
    Eigen::MatrixXd basis(m.cols(), block);
    for (Eigen::Index c = 0; c < block; ++c) {
      basis.col(c) = StartVector(m.cols(), static_cast<std::uint64_t>(c + 1));
    }
    Eigen::VectorXd previous = Eigen::VectorXd::Zero(block);
    for (int iter = 0; iter < kPowerMaxIterations; ++iter) {
      Eigen::MatrixXd next = m.transpose() * (m * basis);
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(next);
      basis = qr.householderQ() * Eigen::MatrixXd::Identity(m.cols(), block);
      Eigen::JacobiSVD<Eigen::MatrixXd> ritz(m * basis);
      values = ritz.singularValues();
      const double change =
          (values.head(q) - previous.head(q)).cwiseAbs().maxCoeff();
      previous = values;
      if (change <= kPowerTolerance * std::max(values(0), 1e-300)) break;
    }
  }
  std::vector<double> out(q);
  for (std::size_t i = 0; i < q; ++i) out[i] = values(static_cast<Eigen::Index>(i));
  return out;
}

std::vector<double> SingularSpectrum(const CooccurrenceMatrix& co,
                                     std::size_t q) {
  return SingularSpectrum(co.a_tilde, q);
}

double Conductance(const CooccurrenceMatrix& co,
                   std::span<const std::uint32_t> image_classes,
                   std::span<const std::uint32_t> text_classes) {
  CheckClasses(image_classes, text_classes);
  if (static_cast<Eigen::Index>(image_classes.size()) != co.a.rows()) {
    throw Error(ErrorCode::kLengthMismatch,
                "class arrays do not match the co-occurrence size");
  }
  double mass = 0.0;
  for (Eigen::Index i = 0; i < co.a.rows(); ++i) {
    for (Eigen::Index j = 0; j < co.a.cols(); ++j) {
      if (image_classes[i] != text_classes[j]) mass += co.a(i, j);
    }
  }
  return std::clamp(mass, 0.0, 1.0);
}

double LabelingError(std::span<const std::uint32_t> image_classes,
                     std::span<const std::uint32_t> text_classes) {
  CheckClasses(image_classes, text_classes);
  if (image_classes.empty()) return 0.0;
  std::size_t mismatched = 0;
  for (std::size_t i = 0; i < image_classes.size(); ++i) {
    if (image_classes[i] != text_classes[i]) ++mismatched;
  }
  return static_cast<double>(mismatched) /
         static_cast<double>(image_classes.size());
}

SpectrumGap ComputeSpectrumGap(const CooccurrenceMatrix& co,
                               std::span<const std::size_t> subset,
                               std::size_t k) {
  if (k + 1 > subset.size()) {
    throw Error(ErrorCode::kBudgetTooSmall,
                "need at least " + std::to_string(k + 1) +
                    " selected examples, got " + std::to_string(subset.size()));
  }
  const Eigen::Index n = co.a_tilde.rows();
  std::vector<char> keep(static_cast<std::size_t>(n), 0);
  for (std::size_t i : subset) {
    if (i >= static_cast<std::size_t>(n)) {
      throw Error(ErrorCode::kIndexOutOfRange, std::to_string(i));
    }
    keep[i] = 1;
  }
  Eigen::MatrixXd masked = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (keep[j]) masked(i, j) = co.a_tilde(i, j);
    }
  }
  const double full_sigma = SingularSpectrum(co.a_tilde, k + 1)[k];
  const double sub_sigma = SingularSpectrum(masked, k + 1)[k];
  SpectrumGap out;
  out.gap = std::abs(full_sigma - sub_sigma);
  out.weyl_bound = SpectralNorm(co.a_tilde - masked);
  return out;
}

EncoderProduct TrainLinearClip(const Eigen::MatrixXd& cross_covariance,
                               double rho, std::size_t rank) {
  if (!(rho > 0.0)) throw Error(ErrorCode::kInvalidConfig, "rho must be > 0");
  if (rank == 0) throw Error(ErrorCode::kInvalidConfig, "rank must be >= 1");
  const Eigen::Index dv = cross_covariance.rows();
  const Eigen::Index dl = cross_covariance.cols();
  const Eigen::Index r = std::min<Eigen::Index>(
      static_cast<Eigen::Index>(rank), std::min(dv, dl));
  Eigen::BDCSVD<Eigen::MatrixXd> svd(cross_covariance,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd scaled = svd.singularValues().head(r) / rho;
  const Eigen::MatrixXd u = svd.matrixU().leftCols(r);
  const Eigen::MatrixXd v = svd.matrixV().leftCols(r);
  EncoderProduct out;
  out.rho = rho;
  out.rank = static_cast<std::size_t>(r);
  out.m = u * scaled.asDiagonal() * v.transpose();
  const Eigen::VectorXd root = scaled.cwiseSqrt();
  out.vision_factor = root.asDiagonal() * u.transpose();
  out.language_factor = root.asDiagonal() * v.transpose();
  return out;
}

double LinearClipLoss(const Eigen::MatrixXd& vision_factor,
                      const Eigen::MatrixXd& language_factor,
                      const Eigen::MatrixXd& cross_covariance, double rho) {
  const double alignment =
      (vision_factor * cross_covariance * language_factor.transpose()).trace();
  const double penalty =
      (vision_factor.transpose() * language_factor).squaredNorm();
  return -alignment + 0.5 * rho * penalty;
}

double ZeroShotAccuracy(const EncoderProduct& model,
                        const EmbeddingMatrix& eval_images,
                        const EmbeddingMatrix& label_vectors,
                        std::span<const std::uint32_t> true_classes) {
  if (eval_images.dim() != static_cast<std::size_t>(model.m.rows()) ||
      label_vectors.dim() != static_cast<std::size_t>(model.m.cols())) {
    throw Error(ErrorCode::kDimMismatch,
                "model is " + std::to_string(model.m.rows()) + "x" +
                    std::to_string(model.m.cols()) + ", images have dim " +
                    std::to_string(eval_images.dim()) + ", labels " +
                    std::to_string(label_vectors.dim()));
  }
  if (true_classes.size() != eval_images.count()) {
    throw Error(ErrorCode::kLengthMismatch, "one true class per image required");
  }
  if (eval_images.count() == 0) {
    throw Error(ErrorCode::kEmptySubset, "no evaluation images");
  }
  // scores = X M Y^T
  const Eigen::MatrixXd label_proj = model.m * ToEigen(label_vectors).transpose();
  const Eigen::MatrixXd scores = ToEigen(eval_images) * label_proj;
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < scores.cols(); ++k) {
      if (scores(i, k) > scores(i, best)) best = k;
    }
    if (static_cast<std::uint32_t>(best) == true_classes[i]) ++correct;
  }
  return static_cast<double>(correct) /
         static_cast<double>(eval_images.count());
}

}  // namespace clipcov
