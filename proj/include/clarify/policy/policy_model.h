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

#ifndef CLARIFY_POLICY_POLICY_MODEL_H_
#define CLARIFY_POLICY_POLICY_MODEL_H_

#include <Eigen/Dense>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "clarify/common/ids.h"
#include "clarify/policy/encoder.h"
#include "clarify/policy/params.h"

namespace clarify {

// One supervised state: query tokens, label history, the allowed output set
// and a target distribution over all labels.
struct PolicySample {
  std::vector<int> tokens;
  std::vector<LabelId> history;
  std::vector<uint8_t> allowed;
  std::vector<double> target;
};

// z_theta(. | q, tau_t). The decoder attends from the current position over
// [query vector, start token, x_1, ..., x_t]; the current position is the
// embedding of the last history label (or the start token) plus its position
// embedding. A residual feed-forward layer then maps to label logits.
class PolicyModel {
 public:
  PolicyModel(const ModelConfig& cfg, Vocabulary vocab, int num_labels);

  const ModelConfig& config() const { return cfg_; }
  const Vocabulary& vocab() const { return vocab_; }
  int num_labels() const { return num_labels_; }
  std::vector<ParamBlock>& blocks() { return blocks_; }
  const std::vector<ParamBlock>& blocks() const { return blocks_; }
  BlockList Blocks() { return BlockPointers(blocks_); }
  size_t NumParameters() const;

  Eigen::VectorXd Logits(std::span<const int> tokens,
                         std::span<const LabelId> history) const;

  // Distribution over labels with allowed[i] != 0; history labels are masked
  // regardless. Throws NoActionError when nothing remains.
  Eigen::VectorXd Forward(std::span<const int> tokens,
                          std::span<const LabelId> history,
                          std::span<const uint8_t> allowed) const;

  // policy_forward with a masked set; history labels must be in `masked`.
  std::map<LabelId, double> Distribution(std::string_view query,
                                         std::span<const LabelId> history,
                                         std::span<const LabelId> masked) const;

  // Forward + backward on one sample; adds to the gradients and returns the
  // sample loss.
  double Accumulate(const PolicySample& sample, KlDirection direction,
                    double smoothing);

 private:
  struct Cache;
  Eigen::VectorXd Run(std::span<const int> tokens,
                      std::span<const LabelId> history, Cache* cache) const;
  void Backprop(const Cache& cache, const Eigen::VectorXd& dlogits);

  enum Slot {
    kLabelEmbedding,
    kPosition,
    kWq,
    kWk,
    kWv,
    kWo,
    kBo,
    kWf,
    kBf,
    kWout,
    kBout,
    kNumSlots
  };
  size_t at(Slot s) const { return first_ + static_cast<size_t>(s); }

  ModelConfig cfg_;
  Vocabulary vocab_;
  int num_labels_;
  std::vector<ParamBlock> blocks_;
  QueryEncoder encoder_;
  Attention attention_;
  size_t first_ = 0;
};

// Allowed mask of size num_labels from a list of label ids.
std::vector<uint8_t> MaskOf(std::span<const LabelId> labels, int num_labels);

}  // namespace clarify

#endif  // CLARIFY_POLICY_POLICY_MODEL_H_
