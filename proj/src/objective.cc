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

#include "clipcov/objective.h"

#include <algorithm>
#include <string>

#include "clipcov/error.h"
#include "clipcov/parallel.h"

namespace clipcov {

double CrossModalSimilarity(const PairedDataset& data, std::size_t i,
                            std::size_t j) {
  if (i >= data.size() || j >= data.size()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "pair (" + std::to_string(i) + ", " + std::to_string(j) +
                    ") outside dataset of size " + std::to_string(data.size()));
  }
  return Dot(data.images().row(i), data.texts().row(j)) +
         Dot(data.images().row(j), data.texts().row(i));
}

StaticGains PrecomputeStaticGains(const PairedDataset& data,
                                  const ClassPartition& partition,
                                  const ObjectiveConfig& config) {
  if (partition.size() != data.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "partition covers " + std::to_string(partition.size()) +
                    " examples, dataset has " + std::to_string(data.size()));
  }
  if (partition.num_classes() > 0 && partition.prototypes.dim() != data.dim()) {
    throw Error(ErrorCode::kDimMismatch, "prototype dim differs from data");
  }
  if (!(config.alpha >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "alpha must be >= 0");
  }
  const std::size_t n = data.size();
  const std::size_t num_classes = partition.num_classes();
  StaticGains g;
  g.coverage.assign(n, 0.0);
  g.self.assign(n, 0.0);
  g.label.assign(n, 0.0);
  g.reg.assign(n, 0.0);
  g.inter.assign(n, 0.0);
  ParallelFor(n, [&](std::size_t e) {
    const std::size_t k = partition.assignment[e];
    const auto& members = partition.members[k];
    const double class_size = static_cast<double>(members.size());
    auto v = data.images().row(e);
    auto t = data.texts().row(e);
    double coverage = 0.0;
    for (std::size_t j : members) {
      double c = Dot(v, data.texts().row(j)) + Dot(data.images().row(j), t);
      if (config.clamp_negative) c = std::max(c, 0.0);
      coverage += c;
    }
    g.coverage[e] = coverage;
    g.self[e] = 2.0 * Dot(v, t);
    g.label[e] = config.alpha * Dot(t, partition.prototypes.row(k)) *
                 (1.0 - 1.0 / class_size);
    g.reg[e] = coverage / (class_size * class_size);
    double inter = 0.0;
    for (std::size_t other = 0; other < num_classes; ++other) {
      if (other == k || partition.members[other].empty()) continue;
      inter += Dot(v, partition.class_text_mean.row(other)) +
               Dot(t, partition.class_image_mean.row(other));
    }
    g.inter[e] = -inter;
  });
  return g;
}

Objective::Objective(const PairedDataset& data, const ClassPartition& partition,
                     ObjectiveConfig config)
    : data_(&data),
      partition_(&partition),
      config_(config),
      gains_(PrecomputeStaticGains(data, partition, config)) {}

double Objective::Cross(std::size_t i, std::size_t j) const {
  return CrossModalSimilarity(*data_, i, j);
}

double Objective::CrossPlus(std::size_t i, std::size_t j) const {
  const double c = Cross(i, j);
  return config_.clamp_negative ? std::max(c, 0.0) : c;
}

ObjectiveBreakdown Objective::ElementGain(std::size_t e,
                                          double class_overlap) const {
  ObjectiveBreakdown d;
  if (config_.use_class) {
    const double class_size =
        static_cast<double>(partition_->class_size(partition_->assignment[e]));
    d.f_class =
        (gains_.coverage[e] - class_overlap - 0.5 * CrossPlus(e, e)) /
        class_size;
  }
  if (config_.use_self) d.f_self = gains_.self[e];
  if (config_.use_label) d.f_label = gains_.label[e];
  if (config_.use_reg) d.f_reg = gains_.reg[e];
  if (config_.use_inter) d.f_inter = gains_.inter[e];
  d.UpdateTotal();
  return d;
}

ObjectiveBreakdown Objective::Evaluate(
    std::span<const std::size_t> subset) const {
  const std::size_t n = size();
  std::vector<char> seen(n, 0);
  std::vector<std::vector<std::size_t>> by_class(partition_->num_classes());
  for (std::size_t i : subset) {
    if (i >= n) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "index " + std::to_string(i) + " >= " + std::to_string(n));
    }
    if (seen[i]) {
      throw Error(ErrorCode::kInvalidConfig,
                  "duplicate index " + std::to_string(i));
    }
    seen[i] = 1;
    by_class[partition_->assignment[i]].push_back(i);
  }
  ObjectiveBreakdown b;
  for (std::size_t k = 0; k < by_class.size(); ++k) {
    const auto& chosen = by_class[k];
    if (chosen.empty()) continue;
    const double class_size = static_cast<double>(partition_->class_size(k));
    double coverage = 0.0;
    for (std::size_t i : chosen) {
      for (std::size_t j : partition_->members[k]) coverage += CrossPlus(i, j);
    }
    double redundancy = 0.0;
    for (std::size_t i : chosen) {
      for (std::size_t j : chosen) redundancy += CrossPlus(i, j);
    }
    if (config_.use_class) {
      b.f_class += (coverage - 0.5 * redundancy) / class_size;
    }
    if (config_.use_reg) b.f_reg += coverage / (class_size * class_size);
  }
  for (std::size_t i : subset) {
    if (config_.use_self) b.f_self += Cross(i, i);
    if (config_.use_label) b.f_label += gains_.label[i];
    if (config_.use_inter) b.f_inter += gains_.inter[i];
  }
  b.UpdateTotal();
  return b;
}

SelectionState::SelectionState(const Objective& objective)
    : objective_(&objective),
      selected_(objective.size(), 0),
      overlap_(objective.size(), 0.0),
      class_selected_(objective.partition().num_classes()),
      class_rows_(objective.partition().num_classes()),
      position_in_class_(objective.size(), 0) {
  const auto& members = objective.partition().members;
  for (const auto& class_members : members) {
    for (std::size_t p = 0; p < class_members.size(); ++p) {
      position_in_class_[class_members[p]] = p;
    }
  }
}

void SelectionState::CheckIndex(std::size_t e) const {
  if (e >= selected_.size()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "element " + std::to_string(e) + " >= " +
                    std::to_string(selected_.size()));
  }
}

bool SelectionState::Contains(std::size_t e) const {
  CheckIndex(e);
  return selected_[e] != 0;
}

std::vector<std::size_t> SelectionState::Sorted() const {
  std::vector<std::size_t> out = order_;
  std::sort(out.begin(), out.end());
  return out;
}

ObjectiveBreakdown SelectionState::MarginalBreakdown(std::size_t e) const {
  if (Contains(e)) {
    throw Error(ErrorCode::kAlreadySelected,
                "element " + std::to_string(e) + " is already selected");
  }
  return objective_->ElementGain(e, overlap_[e]);
}

double SelectionState::MarginalGain(std::size_t e) const {
  return MarginalBreakdown(e).total;
}

double SelectionState::RemovalDelta(std::size_t e) const {
  if (!Contains(e)) {
    throw Error(ErrorCode::kNotSelected,
                "element " + std::to_string(e) + " is not selected");
  }
  const std::size_t k = objective_->partition().assignment[e];
  const std::size_t pos = position_in_class_[e];
  // Same fold Remove() would produce, without mutating.
  double overlap = 0.0;
  const auto& chosen = class_selected_[k];
  for (std::size_t s = 0; s < chosen.size(); ++s) {
    if (chosen[s] == e) continue;
    overlap += class_rows_[k][s][pos];
  }
  return -objective_->ElementGain(e, overlap).total;
}

void SelectionState::Accumulate(const ObjectiveBreakdown& delta, double sign) {
  value_.f_class += sign * delta.f_class;
  value_.f_self += sign * delta.f_self;
  value_.f_label += sign * delta.f_label;
  value_.f_reg += sign * delta.f_reg;
  value_.f_inter += sign * delta.f_inter;
  value_.UpdateTotal();
}

void SelectionState::Add(std::size_t e) {
  const ObjectiveBreakdown delta = MarginalBreakdown(e);
  const auto& partition = objective_->partition();
  const std::size_t k = partition.assignment[e];
  const auto& members = partition.members[k];
  std::vector<double> row(members.size());
  for (std::size_t p = 0; p < members.size(); ++p) {
    row[p] = objective_->CrossPlus(e, members[p]);
    overlap_[members[p]] += row[p];
  }
  class_selected_[k].push_back(e);
  class_rows_[k].push_back(std::move(row));
  selected_[e] = 1;
  order_.push_back(e);
  Accumulate(delta, 1.0);
}

void SelectionState::Remove(std::size_t e) {
  if (!Contains(e)) {
    throw Error(ErrorCode::kNotSelected,
                "element " + std::to_string(e) + " is not selected");
  }
  const auto& partition = objective_->partition();
  const std::size_t k = partition.assignment[e];
  const auto& members = partition.members[k];
  auto& chosen = class_selected_[k];
  auto& rows = class_rows_[k];
  const auto it = std::find(chosen.begin(), chosen.end(), e);
  rows.erase(rows.begin() + (it - chosen.begin()));
  chosen.erase(it);
  for (std::size_t p = 0; p < members.size(); ++p) {
    double overlap = 0.0;
    for (const auto& r : rows) overlap += r[p];
    overlap_[members[p]] = overlap;
  }
  selected_[e] = 0;
  order_.erase(std::find(order_.begin(), order_.end(), e));
  if (order_.empty()) {
    value_ = ObjectiveBreakdown{};
  } else {
    Accumulate(objective_->ElementGain(e, overlap_[e]), -1.0);
  }
}

}  // namespace clipcov
