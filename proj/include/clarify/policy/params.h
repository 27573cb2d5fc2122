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

#ifndef CLARIFY_POLICY_PARAMS_H_
#define CLARIFY_POLICY_PARAMS_H_

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "clarify/common/random.h"
#include "json.hpp"

namespace clarify {

// A named trainable tensor and its gradient accumulator.
struct ParamBlock {
  std::string name;
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad;

  ParamBlock(std::string block_name, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(block_name)),
        value(Eigen::MatrixXd::Zero(rows, cols)),
        grad(Eigen::MatrixXd::Zero(rows, cols)) {}
};

using BlockList = std::vector<ParamBlock*>;

void ZeroGrads(const BlockList& blocks);
double GradNorm(const BlockList& blocks);
bool AllFinite(const BlockList& blocks);
// Rounds every parameter through float32, the checkpoint storage precision.
void QuantizeToFloat(const BlockList& blocks);
// Gaussian init with the given standard deviation.
void InitNormal(ParamBlock& block, double stddev, Rng& rng);

// Token vocabulary of the query encoder. Id 0 is the unknown token.
class Vocabulary {
 public:
  static constexpr int kUnknown = 0;

  Vocabulary();
  explicit Vocabulary(const std::vector<std::string>& tokens);

  // Adds every whitespace token of the texts, in first-seen order.
  static Vocabulary Build(std::span<const std::string> texts);

  int Lookup(const std::string& token) const;
  std::vector<int> Encode(std::string_view text) const;
  size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

enum class KlDirection {
  // D_KL(model || target) with epsilon-smoothed targets.
  kModelToTarget,
  // D_KL(target || model), equivalent to cross-entropy up to a constant.
  kTargetToModel,
};

KlDirection ParseKlDirection(const std::string& name);
const char* KlDirectionName(KlDirection direction);

// Softmax over the entries with allowed[i] != 0; others get exactly zero.
// Throws NoActionError when nothing is allowed.
Eigen::VectorXd MaskedSoftmax(const Eigen::VectorXd& logits,
                              std::span<const uint8_t> allowed);

// KL loss between the masked model distribution `probs` and `target`, and its
// gradient with respect to the logits. Target entries outside the allowed set
// must be zero. `smoothing` applies to kModelToTarget only.
double KlLossAndGrad(const Eigen::VectorXd& probs,
                     std::span<const double> target,
                     std::span<const uint8_t> allowed, KlDirection direction,
                     double smoothing, Eigen::VectorXd* dlogits);

// SGD with momentum and global-norm gradient clipping.
class SgdMomentum {
 public:
  SgdMomentum(double learning_rate, double momentum, double clip_norm);

  // Applies one update from the accumulated gradients. Returns the gradient
  // norm before clipping.
  double Step(const BlockList& blocks);

 private:
  double learning_rate_;
  double momentum_;
  double clip_norm_;
  std::vector<Eigen::MatrixXd> velocity_;
};

}  // namespace clarify

#endif  // CLARIFY_POLICY_PARAMS_H_
