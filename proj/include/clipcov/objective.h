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

#ifndef CLIPCOV_OBJECTIVE_H_
#define CLIPCOV_OBJECTIVE_H_

#include <cstddef>
#include <span>
#include <vector>

#include "clipcov/embedding_io.h"
#include "clipcov/partition.h"

namespace clipcov {

// The selection objective
//
//   F(S) = F_class(S) + F_self(S) + F_label(S) - F_reg(S) + F_inter(S)
//
// over a fixed dataset and partition. With c(i, j) = <v_i, t_j> + <v_j, t_i>
// and c+ = max(c, 0) when clamping:
//
//   F_class = sum_k 1/|V_k| [ sum_{i in S_k, j in V_k} c+(i, j)
//                             - 1/2 sum_{i, j in S_k} c+(i, j) ]
//   F_self  = sum_{i in S} c(i, i)
//   F_label = sum_k sum_{i in S_k} alpha <t_i, z_k> (1 - 1/|V_k|)
//   F_reg   = sum_k 1/|V_k|^2 sum_{i in S_k, j in V_k} c+(i, j)
//   F_inter = - sum_{i in S} sum_{k2 != k(i)} 1/|V_k2| sum_{j in V_k2} c(i, j)
//
// F_class is submodular (clamping keeps the pairwise penalty nonnegative);
// the other terms are modular.
struct ObjectiveConfig {
  double alpha = 0.5;
  bool use_class = true;
  bool use_self = true;
  bool use_label = true;
  bool use_reg = true;
  bool use_inter = true;
  bool clamp_negative = true;
};

// <v_i, t_j> + <v_j, t_i>. kIndexOutOfRange for bad indices.
double CrossModalSimilarity(const PairedDataset& data, std::size_t i,
                            std::size_t j);

// Per-element modular pieces of the objective, independent of S.
struct StaticGains {
  std::vector<double> coverage;  // U_e = sum_{j in V_k} c+(e, j)
  std::vector<double> self;      // c(e, e)
  std::vector<double> label;     // alpha <t_e, z_k> (1 - 1/|V_k|)
  std::vector<double> reg;       // U_e / |V_k|^2
  std::vector<double> inter;     // -sum_{k2 != k} (<v_e, tbar_k2> + <t_e, vbar_k2>)
};

StaticGains PrecomputeStaticGains(const PairedDataset& data,
                                  const ClassPartition& partition,
                                  const ObjectiveConfig& config);

// Immutable objective instance. Holds pointers to the dataset and partition,
// which must outlive it.
class Objective {
 public:
  Objective(const PairedDataset& data, const ClassPartition& partition,
            ObjectiveConfig config = {});

  std::size_t size() const { return data_->size(); }
  const PairedDataset& data() const { return *data_; }
  const ClassPartition& partition() const { return *partition_; }
  const ObjectiveConfig& config() const { return config_; }
  const StaticGains& gains() const { return gains_; }

  // c(i, j) and its clamped form as used by the class and reg terms.
  double Cross(std::size_t i, std::size_t j) const;
  double CrossPlus(std::size_t i, std::size_t j) const;

  // Per-term gain of adding e to a set whose same-class elements contribute
  // `class_overlap` = sum_{i in S_k} c+(i, e). Disabled terms are zero.
  ObjectiveBreakdown ElementGain(std::size_t e, double class_overlap) const;

  // Recomputes every term on `subset` without incremental state.
  ObjectiveBreakdown Evaluate(std::span<const std::size_t> subset) const;

 private:
  const PairedDataset* data_;
  const ClassPartition* partition_;
  ObjectiveConfig config_;
  StaticGains gains_;
};

// Selected set plus the running sums that make marginal gains O(1).
//
// overlap(j) = sum_{i in S_{k(j)}} c+(i, j) is kept as the left fold of the
// cached c+ rows of S_k in insertion order, so add followed by remove
// restores it bit for bit.
class SelectionState {
 public:
  explicit SelectionState(const Objective& objective);

  const Objective& objective() const { return *objective_; }
  bool Contains(std::size_t e) const;
  std::size_t size() const { return order_.size(); }
  const std::vector<std::size_t>& order() const { return order_; }
  std::vector<std::size_t> Sorted() const;

  double overlap(std::size_t e) const { return overlap_[e]; }
  const ObjectiveBreakdown& value() const { return value_; }

  // F(S + e) - F(S). kAlreadySelected if e is in S.
  double MarginalGain(std::size_t e) const;
  ObjectiveBreakdown MarginalBreakdown(std::size_t e) const;

  // F(S - e) - F(S). kNotSelected if e is not in S.
  double RemovalDelta(std::size_t e) const;

  void Add(std::size_t e);
  void Remove(std::size_t e);

 private:
  void CheckIndex(std::size_t e) const;
  void Accumulate(const ObjectiveBreakdown& delta, double sign);

  const Objective* objective_;
  std::vector<char> selected_;
  std::vector<std::size_t> order_;
  std::vector<double> overlap_;
  // Per class: selected members in insertion order and their c+ rows over
  // the class members (parallel to partition.members[k]).
  std::vector<std::vector<std::size_t>> class_selected_;
  std::vector<std::vector<std::vector<double>>> class_rows_;
  std::vector<std::size_t> position_in_class_;
  ObjectiveBreakdown value_;
};

}  // namespace clipcov

#endif  // CLIPCOV_OBJECTIVE_H_
