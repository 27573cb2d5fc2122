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

#ifndef CLARIFY_REWARD_EVALUATOR_H_
#define CLARIFY_REWARD_EVALUATOR_H_

#include <cstdint>
#include <span>
#include <vector>

#include "clarify/common/ids.h"
#include "clarify/inventory/inventory.h"
#include "clarify/reward/reward.h"

namespace clarify {

// Per-query reward evaluator for hot loops (tree search, enumeration). Label
// covers are pre-intersected with the potential-intent set and stored as
// bitsets over its local indices. Uses the uniform P(s|q) closed forms, so
// step entropies reduce to ln|D|. Agrees with TrajectoryReward.
class QueryEvaluator {
 public:
  QueryEvaluator(const Inventory& inv, const AnnotatedQuery& query,
                 const RewardConfig& cfg);

  // Pruned action space, sorted by id.
  const std::vector<LabelId>& candidates() const { return candidates_; }
  size_t num_potential() const { return num_potential_; }
  const RewardConfig& config() const { return cfg_; }

  double Reward(std::span<const LabelId> labels) const;

  // |M(x) & Q(q)|; 0 for non-candidates.
  int CoverSize(LabelId x) const;

  // Number of potential intents covered by the union of the labels.
  int CoveredCount(std::span<const LabelId> labels) const;

 private:
  const uint64_t* CoverOf(LabelId x) const;

  RewardConfig cfg_;
  size_t num_potential_ = 0;
  size_t words_ = 0;
  std::vector<LabelId> candidates_;
  std::vector<int32_t> slot_;        // label index -> candidate slot or -1
  std::vector<uint64_t> covers_;     // candidates_.size() * words_
  std::vector<int> cover_sizes_;     // per slot
  std::vector<double> log_table_;    // ln k for k in [0, |Q|]
  double base_entropy_ = 0.0;
};

}  // namespace clarify

#endif  // CLARIFY_REWARD_EVALUATOR_H_
