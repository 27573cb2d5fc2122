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

#ifndef CLARIFY_POLICY_TRAINING_H_
#define CLARIFY_POLICY_TRAINING_H_

#include <functional>
#include <span>
#include <vector>

#include "clarify/inventory/inventory.h"
#include "clarify/policy/params.h"
#include "clarify/policy/policy_model.h"
#include "clarify/reward/reward.h"
#include "clarify/search/search.h"
#include "json.hpp"

namespace clarify {

struct TrainConfig {
  int epochs = 5;
  double learning_rate = 0.05;
  double momentum = 0.9;
  int batch_size = 32;
  double clip_norm = 5.0;
  // Self-play episodes per epoch; 0 runs every training query once.
  int episodes_per_epoch = 0;
  // SGD passes over the pairs collected in one epoch.
  int passes = 1;
  bool mask_to_candidates = true;
  KlDirection direction = KlDirection::kModelToTarget;
  double smoothing = 1e-8;
  uint64_t seed = 0;
  // Worker threads for episode generation; results do not depend on it.
  int threads = 1;

  // Throws ConfigError.
  void Validate() const;
  nlohmann::json ToJson() const;
  // Missing keys keep the values of `base`.
  static TrainConfig FromJson(const nlohmann::json& j,
                              const TrainConfig& base);
  static TrainConfig FromJson(const nlohmann::json& j) {
    return FromJson(j, TrainConfig());
  }
};

struct EpochStats {
  int epoch = 0;
  // Mean terminal reward of this epoch's self-play episodes.
  double selfplay_reward = 0.0;
  // Mean reward of the policy's own greedy decode on the training queries
  // after the epoch's updates.
  double policy_reward = 0.0;
  double loss = 0.0;
  // Held-out loss, when the method defines one.
  double validation_loss = 0.0;
  size_t samples = 0;
  size_t skipped = 0;
  double seconds = 0.0;

  nlohmann::json ToJson() const;
};

struct TrainLog {
  std::vector<EpochStats> epochs;
  nlohmann::json ToJson() const;
};

// Runs fn(i) for i in [0, n) on up to `threads` workers.
void ParallelFor(size_t n, int threads, const std::function<void(size_t)>& fn);

// Mean loss over the batch before the update; then one optimizer step.
// Throws NumericalError on a non-finite loss or parameters.
double KlTrainingStep(PolicyModel& model, SgdMomentum& optimizer,
                      std::span<const PolicySample> batch,
                      const TrainConfig& cfg);

// Turns a search target into a model sample. The allowed set is the pruned
// action space when mask_to_candidates, else every label outside the prefix.
PolicySample MakePolicySample(const PolicyModel& model,
                              const TrainingPair& pair,
                              bool mask_to_candidates);

// Shuffled minibatch SGD over `samples` for cfg.passes passes. Returns the
// mean pre-update batch loss.
double FitPolicy(PolicyModel& model, SgdMomentum& optimizer,
                 std::vector<PolicySample>& samples, const TrainConfig& cfg,
                 Rng& rng);

Vocabulary CorpusVocabulary(const Corpus& corpus);

// Mean reward of DecodePolicy(model, q, n) over the queries.
double MeanPolicyReward(const PolicyModel& model, const Inventory& inv,
                        std::span<const AnnotatedQuery* const> queries, int n,
                        const RewardConfig& reward_cfg);

struct PolicyTrainingResult {
  PolicyModel model;
  TrainLog log;
};

using EpochCallback =
    std::function<void(const EpochStats&, const PolicyModel&)>;

// Self-play over the training split, then KL steps on the collected pairs,
// once per epoch. Queries without candidate labels are skipped and counted.
// Parameters are rounded to float32 after every epoch so that the in-memory
// model always equals its checkpoint.
PolicyTrainingResult TrainPolicy(const Corpus& corpus,
                                 const SearchConfig& search_cfg,
                                 const TrainConfig& train_cfg,
                                 const RewardConfig& reward_cfg,
                                 const ModelConfig& model_cfg,
                                 const EpochCallback& on_epoch = {});

}  // namespace clarify

#endif  // CLARIFY_POLICY_TRAINING_H_
