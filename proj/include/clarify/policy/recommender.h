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

#ifndef CLARIFY_POLICY_RECOMMENDER_H_
#define CLARIFY_POLICY_RECOMMENDER_H_

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "clarify/inventory/inventory.h"
#include "clarify/policy/checkpoint.h"
#include "clarify/policy/classifier.h"
#include "clarify/policy/policy_model.h"
#include "clarify/reward/reward.h"

namespace clarify {

// Greedy argmax decoding with history masking only. Ties go to the smallest
// label id.
Trajectory DecodePolicy(const PolicyModel& model, std::span<const int> tokens,
                        int n);

// recommend(): clips n to the label count with a warning.
Trajectory Recommend(const PolicyModel& model, std::string_view query, int n);

// Greedy max-coverage under intent scores f: each step takes the label whose
// not-yet-covered intents carry the most score. Ties go to the smallest id.
Trajectory GreedyCoverDecode(const Inventory& inv,
                             std::span<const double> intent_scores, int n);

// Top-n labels by score, ties to the smallest id.
Trajectory TopNDecode(std::span<const double> label_scores, int n);

// Clips n to [0, limit], logging a warning when it was too large.
int ClipLength(int n, int limit);

// A trained method that maps query text to a label sequence. Implementations
// are immutable and safe for concurrent callers.
class Recommender {
 public:
  virtual ~Recommender() = default;
  virtual std::string name() const = 0;
  virtual Trajectory Recommend(std::string_view query, int n) const = 0;
};

class PolicyRecommender : public Recommender {
 public:
  PolicyRecommender(std::string name, PolicyModel model)
      : name_(std::move(name)), model_(std::move(model)) {}
  std::string name() const override { return name_; }
  Trajectory Recommend(std::string_view query, int n) const override;
  const PolicyModel& model() const { return model_; }

 private:
  std::string name_;
  PolicyModel model_;
};

// Greedy baseline: intent classifier + greedy max-coverage.
class GreedyRecommender : public Recommender {
 public:
  GreedyRecommender(std::string name, Classifier model,
                    std::shared_ptr<const Inventory> inv);
  std::string name() const override { return name_; }
  Trajectory Recommend(std::string_view query, int n) const override;

 private:
  std::string name_;
  Classifier model_;
  std::shared_ptr<const Inventory> inv_;
};

// RL without state transition: label classifier, top-n decoding.
class NstRecommender : public Recommender {
 public:
  NstRecommender(std::string name, Classifier model)
      : name_(std::move(name)), model_(std::move(model)) {}
  std::string name() const override { return name_; }
  Trajectory Recommend(std::string_view query, int n) const override;

 private:
  std::string name_;
  Classifier model_;
};

// Uniformly random distinct labels, seeded by (seed, query text).
class RandomRecommender : public Recommender {
 public:
  RandomRecommender(std::string name, int num_labels, uint64_t seed)
      : name_(std::move(name)), num_labels_(num_labels), seed_(seed) {}
  std::string name() const override { return name_; }
  Trajectory Recommend(std::string_view query, int n) const override;

 private:
  std::string name_;
  int num_labels_;
  uint64_t seed_;
};

// Builds the recommender stored in a checkpoint. Throws ValidationError when
// the checkpoint was trained on a different inventory.
std::unique_ptr<Recommender> MakeRecommender(
    const Checkpoint& ckpt, std::shared_ptr<const Inventory> inv,
    std::string name);

}  // namespace clarify

#endif  // CLARIFY_POLICY_RECOMMENDER_H_
