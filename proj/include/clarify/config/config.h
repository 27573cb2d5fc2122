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

#ifndef CLARIFY_CONFIG_CONFIG_H_
#define CLARIFY_CONFIG_CONFIG_H_

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "clarify/inventory/generator.h"
#include "clarify/policy/baselines.h"
#include "clarify/policy/encoder.h"
#include "clarify/policy/recommender.h"
#include "clarify/policy/training.h"
#include "clarify/reward/reward.h"
#include "clarify/search/search.h"
#include "clarify/service/session.h"
#include "json.hpp"

namespace clarify {

// Everything one experiment needs. Sections mirror the JSON file:
//   {seed, generator, search, reward, model, train,
//    supervised: {budget, trajectory_length, train: {...}},
//    classifier: {train: {...}}, service}
// The nested train objects override the top-level train section.
struct ExperimentConfig {
  uint64_t seed = 1;
  GeneratorConfig generator;
  SearchConfig search;
  RewardConfig reward;
  ModelConfig model;
  TrainConfig train;
  SupervisedConfig supervised;
  TrainConfig supervised_train;
  TrainConfig classifier_train;
  ServiceConfig service;

  // Throws ConfigError on unknown sections or invalid values.
  static ExperimentConfig FromJson(const nlohmann::json& j);
  static ExperimentConfig Load(const std::filesystem::path& path);
  nlohmann::json ToJson() const;

  // Copy with `seed` propagated into every seeded section.
  ExperimentConfig WithSeed(uint64_t seed) const;
};

// Trainable methods:
//   rl           self-play policy, configured reward
//   recall_only  self-play policy, beta = 0
//   id3          self-play policy, ID3 sign of the gain term
//   supervised   teacher-forced policy on searched targets
//   greedy       intent classifier + greedy max-coverage
//   nst          label classifier, top-n (no state transition)
const std::vector<std::string>& TrainableMethods();

struct TrainedMethod {
  std::string method;
  std::string checkpoint;  // encoded checkpoint bytes
  TrainLog log;
};

TrainedMethod TrainMethod(const std::string& method, const Corpus& corpus,
                          const ExperimentConfig& cfg,
                          const EpochCallback& on_epoch = {});

// Recommender for encoded checkpoint bytes; checks the inventory hash.
std::unique_ptr<Recommender> RecommenderFromBytes(
    const std::string& bytes, std::shared_ptr<const Inventory> inv,
    const std::string& name);

}  // namespace clarify

#endif  // CLARIFY_CONFIG_CONFIG_H_
