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

#ifndef CLARIFY_POLICY_BASELINES_H_
#define CLARIFY_POLICY_BASELINES_H_

#include <cstddef>
#include <vector>

#include "clarify/inventory/inventory.h"
#include "clarify/policy/classifier.h"
#include "clarify/policy/training.h"
#include "clarify/reward/evaluator.h"
#include "clarify/reward/reward.h"

namespace clarify {

// Candidate sets up to this size are enumerated exhaustively.
inline constexpr size_t kMaxExhaustiveCandidates = 12;

struct SupervisedTarget {
  Trajectory trajectory;
  double reward = 0.0;
  bool exhaustive = true;
  size_t evaluated = 0;  // sequences scored
};

// Best length-min(n, |candidates|) ordered sequence over the pruned action
// space. Exhaustive when there are at most 12 candidates; otherwise a beam
// search scoring at most `budget` partial sequences. Among sequences with
// the maximal reward (within 1e-12), one is chosen uniformly with `rng`.
SupervisedTarget SupervisedTargets(const QueryEvaluator& evaluator, int n,
                                   size_t budget, Rng& rng);

SupervisedTarget SupervisedTargets(const Inventory& inv,
                                   const AnnotatedQuery& query, int n,
                                   const RewardConfig& reward_cfg,
                                   size_t budget, uint64_t seed);

struct SupervisedConfig {
  size_t budget = 200000;
  int trajectory_length = 6;
};

// Teacher-forced cross-entropy on the supervised target sequences, using the
// policy architecture.
PolicyTrainingResult TrainSupervised(const Corpus& corpus,
                                     const SupervisedConfig& sup_cfg,
                                     const TrainConfig& train_cfg,
                                     const RewardConfig& reward_cfg,
                                     const ModelConfig& model_cfg);

enum class ClassifierTarget {
  kIntents,  // greedy baseline: P(s | q)
  kLabels,   // no-state-transition baseline: normalized label relevance
};

// Target distribution of one query for the given head.
std::vector<double> ClassifierTargetOf(const Inventory& inv,
                                       const AnnotatedQuery& query,
                                       ClassifierTarget target);

struct ClassifierTrainingResult {
  Classifier model;
  TrainLog log;  // loss and validation_loss per epoch
};

// KL fit of f_theta to the per-query target; validation KL on the test split
// (or the training split when the test split is empty).
ClassifierTrainingResult TrainClassifier(const Corpus& corpus,
                                         ClassifierTarget target,
                                         const TrainConfig& train_cfg,
                                         const ModelConfig& model_cfg);

// Mean loss of the classifier over the queries, without updating it.
double ClassifierLoss(const Classifier& model, const Inventory& inv,
                      std::span<const AnnotatedQuery* const> queries,
                      ClassifierTarget target, const TrainConfig& cfg);

}  // namespace clarify

#endif  // CLARIFY_POLICY_BASELINES_H_
