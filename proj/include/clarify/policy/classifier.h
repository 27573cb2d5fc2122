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

#ifndef CLARIFY_POLICY_CLASSIFIER_H_
#define CLARIFY_POLICY_CLASSIFIER_H_

#include <Eigen/Dense>
#include <span>
#include <string_view>
#include <vector>

#include "clarify/policy/encoder.h"
#include "clarify/policy/params.h"

namespace clarify {

// History-free classifier f_theta(. | q): the policy's query encoder followed
// by a tanh layer and a softmax head over `num_outputs` classes (intents for
// the greedy baseline, labels for the no-state-transition baseline).
class Classifier {
 public:
  Classifier(const ModelConfig& cfg, Vocabulary vocab, int num_outputs);

  const ModelConfig& config() const { return cfg_; }
  const Vocabulary& vocab() const { return vocab_; }
  int num_outputs() const { return num_outputs_; }
  std::vector<ParamBlock>& blocks() { return blocks_; }
  const std::vector<ParamBlock>& blocks() const { return blocks_; }
  BlockList Blocks() { return BlockPointers(blocks_); }

  Eigen::VectorXd Forward(std::span<const int> tokens) const;
  Eigen::VectorXd Forward(std::string_view query) const;

  // Forward + backward against a full target distribution; returns the loss.
  double Accumulate(std::span<const int> tokens, std::span<const double> target,
                    KlDirection direction, double smoothing);

 private:
  enum Slot { kW, kB, kWout, kBout };
  size_t at(Slot s) const { return first_ + static_cast<size_t>(s); }

  ModelConfig cfg_;
  Vocabulary vocab_;
  int num_outputs_;
  std::vector<ParamBlock> blocks_;
  QueryEncoder encoder_;
  size_t first_ = 0;
};

}  // namespace clarify

#endif  // CLARIFY_POLICY_CLASSIFIER_H_
