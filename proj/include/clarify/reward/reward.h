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

#ifndef CLARIFY_REWARD_REWARD_H_
#define CLARIFY_REWARD_REWARD_H_

#include <string>
#include <vector>

#include "clarify/common/ids.h"
#include "clarify/common/intent_set.h"
#include "clarify/inventory/inventory.h"
#include "json.hpp"

namespace clarify {

// Ordered list of distinct labels. An empty trajectory is the root prefix.
class Trajectory {
 public:
  Trajectory() = default;
  // Throws PreconditionError on repeated labels.
  explicit Trajectory(std::vector<LabelId> labels);

  const std::vector<LabelId>& labels() const { return labels_; }
  size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  LabelId operator[](size_t i) const { return labels_[i]; }

  bool Contains(LabelId x) const;
  // Throws PreconditionError if x is already present.
  void Append(LabelId x);
  Trajectory Prefix(size_t n) const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  std::vector<LabelId> labels_;
};

// Sign of the information-gain term. kPaper evaluates the weighted step
// entropies minus the base entropy; kId3 is the negation (base entropy minus
// the weighted step entropies, the ID3 gain).
enum class GainConvention { kPaper, kId3 };

GainConvention ParseGainConvention(const std::string& name);
const char* GainConventionName(GainConvention convention);

struct RewardConfig {
  double beta = 1.0;
  GainConvention convention = GainConvention::kPaper;

  nlohmann::json ToJson() const;
  static RewardConfig FromJson(const nlohmann::json& j);
};

struct RewardBreakdown {
  IntentSet covered;
  std::vector<IntentSet> marginal_covers;
  std::vector<double> step_entropies;  // nats
  double base_entropy = 0.0;           // nats
  double info_gain = 0.0;
  double recall_mass = 0.0;
  double total = 0.0;
  double beta = 1.0;
  GainConvention convention = GainConvention::kPaper;

  nlohmann::json ToJson() const;
};

// Union over the trajectory of each label's intents restricted to the
// query's potential intents. Throws PreconditionError on unknown labels.
IntentSet CoveredSet(const Inventory& inv, const AnnotatedQuery& query,
                     const Trajectory& tau);

// Intents newly covered by x after the prefix: (M(x) & Q(q)) minus S(prefix).
IntentSet MarginalCover(const Inventory& inv, const AnnotatedQuery& query,
                        const Trajectory& prefix, LabelId x);

// Entropy of P(s|q) renormalised over `cover`; 0 for covers of size <= 1.
double StepEntropy(const AnnotatedQuery& query, const IntentSet& cover);

// Entropy of P(s|q) over the whole potential-intent set.
double BaseEntropy(const AnnotatedQuery& query);

double InformationGain(const Inventory& inv, const AnnotatedQuery& query,
                       const Trajectory& tau, GainConvention convention);

RewardBreakdown TrajectoryReward(const Inventory& inv,
                                 const AnnotatedQuery& query,
                                 const Trajectory& tau,
                                 const RewardConfig& cfg);

}  // namespace clarify

#endif  // CLARIFY_REWARD_REWARD_H_
