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

#include "clipcov/embedding_io.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "clipcov/error.h"

namespace clipcov {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kBadFormat: return "BadFormat";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kTruncated: return "Truncated";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kZeroRow: return "ZeroRow";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kAlreadySelected: return "AlreadySelected";
    case ErrorCode::kNotSelected: return "NotSelected";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kBudgetTooLarge: return "BudgetTooLarge";
    case ErrorCode::kBudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptySubset: return "EmptySubset";
    case ErrorCode::kAllZero: return "AllZero";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kUsage: return "UsageError";
  }
  return "Unknown";
}

bool IsInputError(ErrorCode code) {
  switch (code) {
    case ErrorCode::kAlreadySelected:
    case ErrorCode::kNotSelected:
      return false;
    default:
      return true;
  }
}

namespace {

constexpr char kEmbeddingMagic[4] = {'C', 'C', 'E', 'M'};
constexpr char kAssignmentMagic[4] = {'C', 'C', 'P', 'A'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::uint8_t kDtypeF32 = 1;
constexpr std::size_t kEmbeddingHeaderBytes = 24;
constexpr std::size_t kAssignmentHeaderBytes = 20;

std::string ReadAll(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIoFailure, "read failed " + path.string());
  return bytes;
}

void WriteAll(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot create " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed " + path.string());
}

template <typename T>
T GetLe(const std::string& bytes, std::size_t offset) {
  T value = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    value |= static_cast<T>(static_cast<unsigned char>(bytes[offset + b]))
             << (8 * b);
  }
  return value;
}

template <typename T>
void PutLe(std::string& bytes, T value) {
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    bytes.push_back(static_cast<char>((value >> (8 * b)) & 0xFF));
  }
}

void CheckMagic(const std::string& bytes, const char (&magic)[4],
                const std::filesystem::path& path) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), magic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic,
                path.string() + " does not start with \"" +
                    std::string(magic, 4) + "\"");
  }
}

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::size_t count, std::size_t dim)
    : EmbeddingMatrix(count, dim, std::vector<double>(count * dim, 0.0)) {}

EmbeddingMatrix::EmbeddingMatrix(std::size_t count, std::size_t dim,
                                 std::vector<double> values)
    : count_(count), dim_(dim), values_(std::move(values)) {
  if (dim_ == 0) throw Error(ErrorCode::kInvalidConfig, "dim must be positive");
  if (values_.size() != count_ * dim_) {
    throw Error(ErrorCode::kDimMismatch,
                "expected " + std::to_string(count_ * dim_) + " values, got " +
                    std::to_string(values_.size()));
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      throw Error(ErrorCode::kNonFinite,
                  "row " + std::to_string(k / dim_) + " has a non-finite value");
    }
  }
}

EmbeddingMatrix EmbeddingMatrix::FromRows(
    const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(ErrorCode::kInvalidConfig, "no rows");
  const std::size_t dim = rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    if (r.size() != dim) throw Error(ErrorCode::kDimMismatch, "ragged rows");
    values.insert(values.end(), r.begin(), r.end());
  }
  return EmbeddingMatrix(rows.size(), dim, std::move(values));
}

EmbeddingMatrix EmbeddingMatrix::Subset(
    std::span<const std::size_t> indices) const {
  std::vector<double> values;
  values.reserve(indices.size() * dim_);
  for (std::size_t i : indices) {
    if (i >= count_) {
      throw Error(ErrorCode::kIndexOutOfRange, std::to_string(i));
    }
    auto r = row(i);
    values.insert(values.end(), r.begin(), r.end());
  }
  return EmbeddingMatrix(indices.size(), dim_, std::move(values));
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
  return sum;
}

double Norm(std::span<const double> a) { return std::sqrt(Dot(a, a)); }

PairedDataset::PairedDataset(EmbeddingMatrix images, EmbeddingMatrix texts)
    : images_(std::move(images)), texts_(std::move(texts)) {
  if (images_.count() != texts_.count()) {
    throw Error(ErrorCode::kDimMismatch,
                "image count " + std::to_string(images_.count()) +
                    " != text count " + std::to_string(texts_.count()));
  }
  if (images_.dim() != texts_.dim()) {
    throw Error(ErrorCode::kDimMismatch,
                "image dim " + std::to_string(images_.dim()) +
                    " != text dim " + std::to_string(texts_.dim()));
  }
}

EmbeddingMatrix LoadEmbeddings(const std::filesystem::path& path,
                               std::optional<std::size_t> expected_dim) {
  const std::string bytes = ReadAll(path);
  CheckMagic(bytes, kEmbeddingMagic, path);
  if (bytes.size() < kEmbeddingHeaderBytes) {
    throw Error(ErrorCode::kTruncated, path.string() + ": short header");
  }
  const auto version = GetLe<std::uint32_t>(bytes, 4);
  const auto count = GetLe<std::uint64_t>(bytes, 8);
  const auto dim = GetLe<std::uint32_t>(bytes, 16);
  const auto dtype = static_cast<std::uint8_t>(bytes[20]);
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kBadFormat,
                path.string() + ": unsupported version " +
                    std::to_string(version));
  }
  if (dtype != kDtypeF32) {
    throw Error(ErrorCode::kBadFormat,
                path.string() + ": unsupported dtype " + std::to_string(dtype));
  }
  if (bytes[21] != 0 || bytes[22] != 0 || bytes[23] != 0) {
    throw Error(ErrorCode::kBadFormat, path.string() + ": nonzero padding");
  }
  if (dim == 0) throw Error(ErrorCode::kBadFormat, path.string() + ": dim 0");
  if (expected_dim && *expected_dim != dim) {
    throw Error(ErrorCode::kDimMismatch,
                path.string() + ": header dim " + std::to_string(dim) +
                    ", expected " + std::to_string(*expected_dim));
  }
  const std::size_t payload = bytes.size() - kEmbeddingHeaderBytes;
  // Compare in row units first so a hostile count cannot overflow.
  const std::size_t row_bytes = static_cast<std::size_t>(dim) * 4;
  if (count > payload / row_bytes) {
    throw Error(ErrorCode::kTruncated,
                path.string() + ": header promises " + std::to_string(count) +
                    " rows, payload holds " +
                    std::to_string(payload / row_bytes));
  }
  if (payload != count * row_bytes) {
    throw Error(ErrorCode::kBadFormat, path.string() + ": trailing bytes");
  }
  std::vector<double> values(count * dim);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const auto raw =
        GetLe<std::uint32_t>(bytes, kEmbeddingHeaderBytes + 4 * k);
    const float f = std::bit_cast<float>(raw);
    if (!std::isfinite(f)) {
      throw Error(ErrorCode::kNonFinite,
                  path.string() + ": row " + std::to_string(k / dim));
    }
    values[k] = static_cast<double>(f);
  }
  return EmbeddingMatrix(count, dim, std::move(values));
}

void SaveEmbeddings(const EmbeddingMatrix& matrix,
                    const std::filesystem::path& path) {
  std::string bytes(kEmbeddingMagic, 4);
  PutLe<std::uint32_t>(bytes, kFormatVersion);
  PutLe<std::uint64_t>(bytes, matrix.count());
  PutLe<std::uint32_t>(bytes, static_cast<std::uint32_t>(matrix.dim()));
  bytes.push_back(static_cast<char>(kDtypeF32));
  bytes.append(3, '\0');
  bytes.reserve(bytes.size() + 4 * matrix.values().size());
  for (double v : matrix.values()) {
    const float f = static_cast<float>(v);
    if (!std::isfinite(f)) {
      throw Error(ErrorCode::kNonFinite, "value overflows f32");
    }
    PutLe<std::uint32_t>(bytes, std::bit_cast<std::uint32_t>(f));
  }
  WriteAll(path, bytes);
}

EmbeddingMatrix NormalizeRows(const EmbeddingMatrix& matrix) {
  std::vector<double> values = matrix.values();
  const std::size_t dim = matrix.dim();
  for (std::size_t i = 0; i < matrix.count(); ++i) {
    const double norm = Norm(matrix.row(i));
    if (norm <= kZeroNormThreshold) {
      throw Error(ErrorCode::kZeroRow, "row " + std::to_string(i));
    }
    for (std::size_t j = 0; j < dim; ++j) values[i * dim + j] /= norm;
  }
  return EmbeddingMatrix(matrix.count(), dim, std::move(values));
}

ClassAssignment LoadAssignment(const std::filesystem::path& path) {
  const std::string bytes = ReadAll(path);
  CheckMagic(bytes, kAssignmentMagic, path);
  if (bytes.size() < kAssignmentHeaderBytes) {
    throw Error(ErrorCode::kTruncated, path.string() + ": short header");
  }
  const auto version = GetLe<std::uint32_t>(bytes, 4);
  const auto count = GetLe<std::uint64_t>(bytes, 8);
  const auto num_classes = GetLe<std::uint32_t>(bytes, 16);
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kBadFormat,
                path.string() + ": unsupported version " +
                    std::to_string(version));
  }
  const std::size_t payload = bytes.size() - kAssignmentHeaderBytes;
  if (count > payload / 4) {
    throw Error(ErrorCode::kTruncated,
                path.string() + ": header promises " + std::to_string(count) +
                    " ids");
  }
  if (payload != count * 4) {
    throw Error(ErrorCode::kBadFormat, path.string() + ": trailing bytes");
  }
  ClassAssignment out;
  out.num_classes = num_classes;
  out.ids.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.ids[i] = GetLe<std::uint32_t>(bytes, kAssignmentHeaderBytes + 4 * i);
    if (out.ids[i] >= num_classes) {
      throw Error(ErrorCode::kBadFormat,
                  path.string() + ": class id " + std::to_string(out.ids[i]) +
                      " >= num_classes at row " + std::to_string(i));
    }
  }
  return out;
}

void SaveAssignment(const ClassAssignment& assignment,
                    const std::filesystem::path& path) {
  std::string bytes(kAssignmentMagic, 4);
  PutLe<std::uint32_t>(bytes, kFormatVersion);
  PutLe<std::uint64_t>(bytes, assignment.ids.size());
  PutLe<std::uint32_t>(bytes, assignment.num_classes);
  for (std::uint32_t id : assignment.ids) {
    if (id >= assignment.num_classes) {
      throw Error(ErrorCode::kInvalidConfig, "class id out of range");
    }
    PutLe<std::uint32_t>(bytes, id);
  }
  WriteAll(path, bytes);
}

nlohmann::json ToJson(const ObjectiveBreakdown& b) {
  return {{"f_class", b.f_class}, {"f_self", b.f_self},
          {"f_label", b.f_label}, {"f_reg", b.f_reg},
          {"f_inter", b.f_inter}, {"total", b.total}};
}

ObjectiveBreakdown BreakdownFromJson(const nlohmann::json& json) {
  ObjectiveBreakdown b;
  b.f_class = json.at("f_class").get<double>();
  b.f_self = json.at("f_self").get<double>();
  b.f_label = json.at("f_label").get<double>();
  b.f_reg = json.at("f_reg").get<double>();
  b.f_inter = json.at("f_inter").get<double>();
  b.total = json.at("total").get<double>();
  return b;
}

SelectionResult MakeSelectionResult(std::vector<std::size_t> order,
                                    std::size_t budget,
                                    ObjectiveBreakdown objective,
                                    std::optional<std::uint64_t> seed) {
  if (order.size() > budget) {
    throw Error(ErrorCode::kInvalidConfig,
                "selection of " + std::to_string(order.size()) +
                    " exceeds budget " + std::to_string(budget));
  }
  SelectionResult result;
  result.indices = order;
  std::sort(result.indices.begin(), result.indices.end());
  if (std::adjacent_find(result.indices.begin(), result.indices.end()) !=
      result.indices.end()) {
    throw Error(ErrorCode::kInvalidConfig, "duplicate index in selection");
  }
  result.selection_order = std::move(order);
  result.objective = objective;
  result.budget = budget;
  result.seed = seed;
  return result;
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  WriteAll(path, text);
}

std::string ReadTextFile(const std::filesystem::path& path) {
  return ReadAll(path);
}

void WriteSelection(const SelectionResult& result,
                    const std::filesystem::path& index_path,
                    const std::filesystem::path& report_path,
                    const nlohmann::json& extra) {
  std::string lines;
  for (std::size_t i : result.indices) {
    lines += std::to_string(i);
    lines += '\n';
  }
  WriteAll(index_path, lines);

  nlohmann::ordered_json report = nlohmann::ordered_json::object();
  for (const auto& [key, value] : extra.items()) report[key] = value;
  report["budget"] = result.budget;
  report["selected"] = result.indices.size();
  report["indices_path"] = index_path.string();
  report["selection_order"] = result.selection_order;
  report["seed"] = result.seed ? nlohmann::json(*result.seed) : nlohmann::json();
  report["objective"] = ToJson(result.objective);
  WriteAll(report_path, report.dump(2) + "\n");
}

std::vector<std::size_t> ReadIndexFile(const std::filesystem::path& path) {
  const std::string text = ReadAll(path);
  std::vector<std::size_t> indices;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() ||
        !std::all_of(line.begin(), line.end(),
                     [](char c) { return c >= '0' && c <= '9'; })) {
      throw Error(ErrorCode::kBadFormat,
                  path.string() + ": bad index line \"" + line + "\"");
    }
    const std::size_t value = std::stoull(line);
    if (!indices.empty() && value <= indices.back()) {
      throw Error(ErrorCode::kBadFormat,
                  path.string() + ": indices not strictly ascending");
    }
    indices.push_back(value);
  }
  if (!text.empty() && text.back() != '\n') {
    throw Error(ErrorCode::kBadFormat, path.string() + ": missing newline");
  }
  return indices;
}

SelectionResult ReadSelection(const std::filesystem::path& index_path,
                              const std::filesystem::path& report_path) {
  nlohmann::json report;
  try {
    report = nlohmann::json::parse(ReadAll(report_path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBadFormat, report_path.string() + ": " + e.what());
  }
  std::vector<std::size_t> order;
  if (report.contains("selection_order")) {
    order = report["selection_order"].get<std::vector<std::size_t>>();
  }
  std::optional<std::uint64_t> seed;
  if (report.contains("seed") && !report["seed"].is_null()) {
    seed = report["seed"].get<std::uint64_t>();
  }
  SelectionResult result = MakeSelectionResult(
      std::move(order), report.at("budget").get<std::size_t>(),
      BreakdownFromJson(report.at("objective")), seed);
  if (result.indices != ReadIndexFile(index_path)) {
    throw Error(ErrorCode::kBadFormat,
                "index file disagrees with the report's selection_order");
  }
  return result;
}

}  // namespace clipcov
