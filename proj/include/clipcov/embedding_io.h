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

#ifndef CLIPCOV_EMBEDDING_IO_H_
#define CLIPCOV_EMBEDDING_IO_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

namespace clipcov {

// Dense n x r row-major matrix of finite doubles, one row per example. The
// on-disk payload is f32; everything in memory is f64.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  // Zero-filled.
  EmbeddingMatrix(std::size_t count, std::size_t dim);
  // Throws kDimMismatch if values.size() != count * dim, kNonFinite on
  // NaN/Inf, kInvalidConfig if dim == 0.
  EmbeddingMatrix(std::size_t count, std::size_t dim,
                  std::vector<double> values);

  static EmbeddingMatrix FromRows(
      const std::vector<std::vector<double>>& rows);

  std::size_t count() const { return count_; }
  std::size_t dim() const { return dim_; }
  const std::vector<double>& values() const { return values_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  std::span<double> mutable_row(std::size_t i) {
    return {values_.data() + i * dim_, dim_};
  }
  double operator()(std::size_t i, std::size_t j) const {
    return values_[i * dim_ + j];
  }

  // Copies the given rows, in the given order.
  EmbeddingMatrix Subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const EmbeddingMatrix&,
                         const EmbeddingMatrix&) = default;

 private:
  std::size_t count_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

double Dot(std::span<const double> a, std::span<const double> b);
double Norm(std::span<const double> a);

// Aligned image/caption embeddings: row i of each matrix is example i.
class PairedDataset {
 public:
  PairedDataset() = default;
  // Throws kDimMismatch when counts or dims differ.
  PairedDataset(EmbeddingMatrix images, EmbeddingMatrix texts);

  const EmbeddingMatrix& images() const { return images_; }
  const EmbeddingMatrix& texts() const { return texts_; }
  std::size_t size() const { return images_.count(); }
  std::size_t dim() const { return images_.dim(); }

 private:
  EmbeddingMatrix images_;
  EmbeddingMatrix texts_;
};

// CCEM reader. Fails with kBadMagic, kBadFormat (version/dtype/padding or
// trailing bytes), kTruncated, kDimMismatch or kNonFinite; never returns a
// partially filled matrix.
EmbeddingMatrix LoadEmbeddings(const std::filesystem::path& path,
                               std::optional<std::size_t> expected_dim = {});
void SaveEmbeddings(const EmbeddingMatrix& matrix,
                    const std::filesystem::path& path);

// Returns a copy whose rows have unit L2 norm. kZeroRow names the first row
// with norm <= 1e-12.
EmbeddingMatrix NormalizeRows(const EmbeddingMatrix& matrix);

inline constexpr double kZeroNormThreshold = 1e-12;

// Per-example class ids as stored in a CCPA file.
struct ClassAssignment {
  std::vector<std::uint32_t> ids;
  std::uint32_t num_classes = 0;

  friend bool operator==(const ClassAssignment&,
                         const ClassAssignment&) = default;
};

ClassAssignment LoadAssignment(const std::filesystem::path& path);
void SaveAssignment(const ClassAssignment& assignment,
                    const std::filesystem::path& path);

// Values of the selection objective, term by term. total is always
// f_class + f_self + f_label - f_reg + f_inter.
struct ObjectiveBreakdown {
  double f_class = 0.0;
  double f_self = 0.0;
  double f_label = 0.0;
  double f_reg = 0.0;
  double f_inter = 0.0;
  double total = 0.0;

  void UpdateTotal() { total = f_class + f_self + f_label - f_reg + f_inter; }
};

nlohmann::json ToJson(const ObjectiveBreakdown& breakdown);
ObjectiveBreakdown BreakdownFromJson(const nlohmann::json& json);

struct SelectionResult {
  std::vector<std::size_t> indices;          // ascending
  std::vector<std::size_t> selection_order;  // as chosen
  ObjectiveBreakdown objective;
  std::size_t budget = 0;
  std::optional<std::uint64_t> seed;
};

// Builds a result from the order in which elements were chosen. Throws
// kInvalidConfig on duplicates or when the order exceeds the budget.
SelectionResult MakeSelectionResult(std::vector<std::size_t> order,
                                    std::size_t budget,
                                    ObjectiveBreakdown objective = {},
                                    std::optional<std::uint64_t> seed = {});

// Writes the index file and a JSON report. Keys of `extra` are merged into
// the report (used by the CLI for config echo, timings, ...).
void WriteSelection(const SelectionResult& result,
                    const std::filesystem::path& index_path,
                    const std::filesystem::path& report_path,
                    const nlohmann::json& extra = nlohmann::json::object());

std::vector<std::size_t> ReadIndexFile(const std::filesystem::path& path);
SelectionResult ReadSelection(const std::filesystem::path& index_path,
                              const std::filesystem::path& report_path);

// File helpers shared by the CLI.
void WriteTextFile(const std::filesystem::path& path, const std::string& text);
std::string ReadTextFile(const std::filesystem::path& path);

}  // namespace clipcov

#endif  // CLIPCOV_EMBEDDING_IO_H_
