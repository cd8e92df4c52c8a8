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

#include "clipcov/synth.h"

#include <cmath>
#include <random>
#include <string>

#include "clipcov/error.h"

namespace clipcov {
namespace {

Eigen::VectorXd GaussianVector(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
  return v;
}

// Thin Q of a Gaussian matrix: orthonormal columns, operator norm 1.
Eigen::MatrixXd OrthonormalMap(std::size_t rows, std::size_t cols,
                               std::mt19937_64& rng) {
  Eigen::MatrixXd g(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(cols));
  std::normal_distribution<double> normal;
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(g.rows(), g.cols());
}

void ProjectToUnitBall(Eigen::VectorXd& v) {
  const double norm = v.norm();
  if (norm > 1.0) v /= norm;
}

EmbeddingMatrix FromEigenRows(const std::vector<Eigen::VectorXd>& rows,
                              std::size_t dim) {
  std::vector<double> values;
  values.reserve(rows.size() * dim);
  for (const auto& r : rows) values.insert(values.end(), r.data(), r.data() + r.size());
  return EmbeddingMatrix(rows.size(), dim, std::move(values));
}

}  // namespace

void ValidateConfig(const SyntheticConfig& c) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidConfig, what);
  };
  if (c.num_classes < 1) fail("need at least one class");
  if (c.n < c.num_classes) fail("n must be >= number of classes");
  if (c.latent_dim < 1) fail("latent_dim must be positive");
  if (c.latent_dim > std::min(c.vision_dim, c.language_dim)) {
    fail("latent_dim must not exceed the modality dims");
  }
  if (!(c.noise_v >= 0.0) || !(c.noise_l >= 0.0) ||
      !(c.within_class_spread >= 0.0)) {
    fail("noise and spread must be >= 0");
  }
  if (!(c.eval_fraction >= 0.0) || !(c.eval_fraction < 1.0)) {
    fail("eval_fraction must be in [0, 1)");
  }
  if (c.orthogonal_anchors && c.num_classes > c.latent_dim) {
    fail("orthogonal anchors need num_classes <= latent_dim");
  }
  if (!c.class_proportions.empty()) {
    if (c.class_proportions.size() != c.num_classes) {
      fail("one proportion per class required");
    }
    double total = 0.0;
    for (double p : c.class_proportions) {
      if (!(p >= 0.0)) fail("proportions must be >= 0");
      total += p;
    }
    if (!(total > 0.0)) fail("proportions must not all be zero");
  }
}

SyntheticDataset GenerateDataset(const SyntheticConfig& config) {
  ValidateConfig(config);
  std::mt19937_64 rng(config.seed);
  const std::size_t d = config.latent_dim;
  const std::size_t k_classes = config.num_classes;

  std::vector<Eigen::VectorXd> anchors;
  for (std::size_t k = 0; k < k_classes; ++k) {
    Eigen::VectorXd a = GaussianVector(d, rng);
    if (config.orthogonal_anchors) {
      for (const auto& prev : anchors) a -= prev.dot(a) * prev;
    }
    anchors.push_back(a.normalized());
  }
  SyntheticDataset out;
  out.vision_map = OrthonormalMap(config.vision_dim, d, rng);
  out.language_map = OrthonormalMap(config.language_dim, d, rng);

  const std::vector<double> weights =
      config.class_proportions.empty() ? std::vector<double>(k_classes, 1.0)
                                       : config.class_proportions;
  std::discrete_distribution<std::size_t> pick_class(weights.begin(),
                                                     weights.end());
  std::normal_distribution<double> normal;

  const auto eval_count = static_cast<std::size_t>(
      std::llround(config.eval_fraction * static_cast<double>(config.n)));
  const std::size_t train_count = config.n - eval_count;

  auto make_split = [&](std::size_t count) {
    std::vector<Eigen::VectorXd> xv, xl, uv, ul;
    std::vector<std::uint32_t> classes;
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t y = pick_class(rng);
      Eigen::VectorXd z = anchors[y];
      for (std::size_t j = 0; j < d; ++j) {
        z(j) += config.within_class_spread * normal(rng);
      }
      Eigen::VectorXd u_v = z;
      Eigen::VectorXd u_l = z;
      for (std::size_t j = 0; j < d; ++j) u_v(j) += config.noise_v * normal(rng);
      for (std::size_t j = 0; j < d; ++j) u_l(j) += config.noise_l * normal(rng);
      ProjectToUnitBall(u_v);
      ProjectToUnitBall(u_l);
      xv.push_back(out.vision_map * u_v);
      xl.push_back(out.language_map * u_l);
      uv.push_back(std::move(u_v));
      ul.push_back(std::move(u_l));
      classes.push_back(static_cast<std::uint32_t>(y));
    }
    SyntheticSplit split;
    split.images = FromEigenRows(xv, config.vision_dim);
    split.texts = FromEigenRows(xl, config.language_dim);
    split.proxy = PairedDataset(FromEigenRows(uv, d), FromEigenRows(ul, d));
    split.classes = std::move(classes);
    return split;
  };
  out.train = make_split(train_count);
  out.eval = make_split(eval_count);
  out.anchors = FromEigenRows(anchors, d);
  std::vector<Eigen::VectorXd> labels;
  for (const auto& a : anchors) labels.push_back(out.language_map * a);
  out.label_vectors = FromEigenRows(labels, config.language_dim);
  return out;
}

}  // namespace clipcov
