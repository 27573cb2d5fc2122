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

#include "clarify/policy/classifier.h"

#include <cmath>

#include "clarify/common/errors.h"

namespace clarify {

using Eigen::VectorXd;

Classifier::Classifier(const ModelConfig& cfg, Vocabulary vocab,
                       int num_outputs)
    : cfg_(cfg), vocab_(std::move(vocab)), num_outputs_(num_outputs) {
  cfg_.Validate();
  if (num_outputs < 1) throw PreconditionError("classifier needs >= 1 class");
  Rng rng = MakeRng(cfg.seed, 0xc1a55);
  blocks_.reserve(16);
  encoder_ = QueryEncoder(cfg_, vocab_.size(), blocks_, rng);
  first_ = blocks_.size();
  const Eigen::Index d = cfg_.dim;
  const double w_std = 1.0 / std::sqrt(static_cast<double>(d));
  AddBlock(blocks_, "head.w1", d, d, w_std, rng);
  AddBlock(blocks_, "head.b1", d, 1, 0.0, rng);
  AddBlock(blocks_, "head.w", num_outputs, d,
           cfg_.zero_output_init ? 0.0 : w_std, rng);
  AddBlock(blocks_, "head.b", num_outputs, 1, 0.0, rng);
}

VectorXd Classifier::Forward(std::span<const int> tokens) const {
  QueryEncoder::Cache cache;
  const VectorXd qv = encoder_.Forward(blocks_, tokens, &cache);
  const VectorXd r =
      (blocks_[at(kW)].value * qv + blocks_[at(kB)].value).array().tanh();
  const VectorXd logits = blocks_[at(kWout)].value * r + blocks_[at(kBout)].value;
  const std::vector<uint8_t> all(num_outputs_, 1);
  return MaskedSoftmax(logits, all);
}

VectorXd Classifier::Forward(std::string_view query) const {
  const std::vector<int> tokens = vocab_.Encode(query);
  return Forward(tokens);
}

double Classifier::Accumulate(std::span<const int> tokens,
                              std::span<const double> target,
                              KlDirection direction, double smoothing) {
  QueryEncoder::Cache cache;
  const VectorXd qv = encoder_.Forward(blocks_, tokens, &cache);
  const VectorXd r =
      (blocks_[at(kW)].value * qv + blocks_[at(kB)].value).array().tanh();
  const VectorXd logits = blocks_[at(kWout)].value * r + blocks_[at(kBout)].value;
  const std::vector<uint8_t> all(num_outputs_, 1);
  const VectorXd probs = MaskedSoftmax(logits, all);
  VectorXd dlogits;
  const double loss =
      KlLossAndGrad(probs, target, all, direction, smoothing, &dlogits);

  blocks_[at(kWout)].grad += dlogits * r.transpose();
  blocks_[at(kBout)].grad += dlogits;
  const VectorXd dr = blocks_[at(kWout)].value.transpose() * dlogits;
  const VectorXd da = dr.array() * (1.0 - r.array().square());
  blocks_[at(kW)].grad += da * qv.transpose();
  blocks_[at(kB)].grad += da;
  encoder_.Backward(blocks_, cache, blocks_[at(kW)].value.transpose() * da);
  return loss;
}

}  // namespace clarify
