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

#include "clarify/policy/policy_model.h"

#include <algorithm>
#include <cmath>

#include "clarify/common/errors.h"

namespace clarify {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct PolicyModel::Cache {
  QueryEncoder::Cache encoder;
  std::vector<int> memory_labels;     // column j >= 1: label index or start
  std::vector<int> memory_positions;  // column j >= 1: position index
  Attention::Cache attention;
  VectorXd heads;
  VectorXd r;
  VectorXd u;
  VectorXd y;
};

std::vector<uint8_t> MaskOf(std::span<const LabelId> labels, int num_labels) {
  std::vector<uint8_t> mask(num_labels, 0);
  for (LabelId x : labels) {
    if (x.value() < 0 || x.value() >= num_labels) {
      throw PreconditionError("label " + std::to_string(x.value()) +
                              " outside the label vocabulary");
    }
    mask[x.index()] = 1;
  }
  return mask;
}

PolicyModel::PolicyModel(const ModelConfig& cfg, Vocabulary vocab,
                         int num_labels)
    : cfg_(cfg),
      vocab_(std::move(vocab)),
      num_labels_(num_labels),
      attention_(cfg.dim, cfg.heads) {
  cfg_.Validate();
  if (num_labels < 1) throw PreconditionError("policy needs >= 1 label");
  Rng rng = MakeRng(cfg.seed, 0x9011c1);
  blocks_.reserve(32);
  encoder_ = QueryEncoder(cfg_, vocab_.size(), blocks_, rng);
  first_ = blocks_.size();
  const Eigen::Index d = cfg_.dim;
  const double w_std = 1.0 / std::sqrt(static_cast<double>(d));
  // The extra column is the start token [st].
  AddBlock(blocks_, "decoder.label_embedding", d, num_labels + 1,
           cfg_.embedding_std, rng);
  AddBlock(blocks_, "decoder.position", d, cfg_.max_positions,
           cfg_.embedding_std, rng);
  AddBlock(blocks_, "decoder.wq", d, d, w_std, rng);
  AddBlock(blocks_, "decoder.wk", d, d, w_std, rng);
  AddBlock(blocks_, "decoder.wv", d, d, w_std, rng);
  AddBlock(blocks_, "decoder.wo", d, d, w_std, rng);
  AddBlock(blocks_, "decoder.bo", d, 1, 0.0, rng);
  AddBlock(blocks_, "decoder.wf", d, d, w_std, rng);
  AddBlock(blocks_, "decoder.bf", d, 1, 0.0, rng);
  AddBlock(blocks_, "head.w", num_labels, d,
           cfg_.zero_output_init ? 0.0 : w_std, rng);
  AddBlock(blocks_, "head.b", num_labels, 1, 0.0, rng);
}

size_t PolicyModel::NumParameters() const {
  size_t n = 0;
  for (const ParamBlock& b : blocks_) n += static_cast<size_t>(b.value.size());
  return n;
}

VectorXd PolicyModel::Run(std::span<const int> tokens,
                          std::span<const LabelId> history,
                          Cache* cache) const {
  const VectorXd qv = encoder_.Forward(blocks_, tokens, &cache->encoder);
  const MatrixXd& lab = blocks_[at(kLabelEmbedding)].value;
  const MatrixXd& pos = blocks_[at(kPosition)].value;
  const Eigen::Index steps = static_cast<Eigen::Index>(history.size()) + 1;
  MatrixXd memory(cfg_.dim, steps + 1);
  memory.col(0) = qv;
  cache->memory_labels.resize(steps);
  cache->memory_positions.resize(steps);
  for (Eigen::Index j = 0; j < steps; ++j) {
    const int label = j == 0 ? num_labels_ : history[j - 1].value();
    if (label < 0 || (j > 0 && label >= num_labels_)) {
      throw PreconditionError("history label outside the label vocabulary");
    }
    const int p = std::min<int>(static_cast<int>(j), cfg_.max_positions - 1);
    cache->memory_labels[j] = label;
    cache->memory_positions[j] = p;
    memory.col(j + 1) = lab.col(label) + pos.col(p);
  }
  const VectorXd current = memory.col(steps);
  cache->heads =
      attention_.Forward(blocks_[at(kWq)].value, blocks_[at(kWk)].value,
                         blocks_[at(kWv)].value, current, memory,
                         &cache->attention);
  const VectorXd z = current + blocks_[at(kWo)].value * cache->heads +
                     blocks_[at(kBo)].value;
  cache->r = z.array().tanh();
  cache->u = (blocks_[at(kWf)].value * cache->r + blocks_[at(kBf)].value)
                 .array()
                 .tanh();
  cache->y = cache->r + cache->u;
  return blocks_[at(kWout)].value * cache->y + blocks_[at(kBout)].value;
}

VectorXd PolicyModel::Logits(std::span<const int> tokens,
                             std::span<const LabelId> history) const {
  Cache cache;
  return Run(tokens, history, &cache);
}

VectorXd PolicyModel::Forward(std::span<const int> tokens,
                              std::span<const LabelId> history,
                              std::span<const uint8_t> allowed) const {
  if (allowed.size() != static_cast<size_t>(num_labels_)) {
    throw PreconditionError("mask size differs from the label count");
  }
  std::vector<uint8_t> mask(allowed.begin(), allowed.end());
  for (LabelId x : history) mask[x.index()] = 0;
  return MaskedSoftmax(Logits(tokens, history), mask);
}

std::map<LabelId, double> PolicyModel::Distribution(
    std::string_view query, std::span<const LabelId> history,
    std::span<const LabelId> masked) const {
  std::vector<uint8_t> allowed(num_labels_, 1);
  const std::vector<uint8_t> masked_flags = MaskOf(masked, num_labels_);
  for (int i = 0; i < num_labels_; ++i) {
    if (masked_flags[i]) allowed[i] = 0;
  }
  for (LabelId x : history) {
    if (allowed[x.index()]) {
      throw PreconditionError("mask must exclude every history label");
    }
  }
  const std::vector<int> tokens = vocab_.Encode(query);
  const VectorXd probs = Forward(tokens, history, allowed);
  std::map<LabelId, double> out;
  for (int i = 0; i < num_labels_; ++i) {
    if (allowed[i]) out.emplace(LabelId(i), probs[i]);
  }
  return out;
}

double PolicyModel::Accumulate(const PolicySample& sample,
                               KlDirection direction, double smoothing) {
  Cache cache;
  const VectorXd logits = Run(sample.tokens, sample.history, &cache);
  std::vector<uint8_t> mask = sample.allowed;
  for (LabelId x : sample.history) mask[x.index()] = 0;
  const VectorXd probs = MaskedSoftmax(logits, mask);
  VectorXd dlogits;
  const double loss = KlLossAndGrad(probs, sample.target, mask, direction,
                                    smoothing, &dlogits);
  Backprop(cache, dlogits);
  return loss;
}

void PolicyModel::Backprop(const Cache& cache, const VectorXd& dlogits) {
  blocks_[at(kWout)].grad += dlogits * cache.y.transpose();
  blocks_[at(kBout)].grad += dlogits;
  const VectorXd dy = blocks_[at(kWout)].value.transpose() * dlogits;
  const VectorXd dff = dy.array() * (1.0 - cache.u.array().square());
  blocks_[at(kWf)].grad += dff * cache.r.transpose();
  blocks_[at(kBf)].grad += dff;
  const VectorXd dr = dy + blocks_[at(kWf)].value.transpose() * dff;
  const VectorXd dz = dr.array() * (1.0 - cache.r.array().square());
  blocks_[at(kWo)].grad += dz * cache.heads.transpose();
  blocks_[at(kBo)].grad += dz;
  const VectorXd dheads = blocks_[at(kWo)].value.transpose() * dz;

  const Eigen::Index cols = cache.attention.memory.cols();
  VectorXd dcurrent = dz;
  MatrixXd dmemory = MatrixXd::Zero(cfg_.dim, cols);
  attention_.Backward(blocks_[at(kWq)].value, blocks_[at(kWk)].value,
                      blocks_[at(kWv)].value, cache.attention, dheads,
                      &blocks_[at(kWq)].grad, &blocks_[at(kWk)].grad,
                      &blocks_[at(kWv)].grad, &dcurrent, &dmemory);
  dmemory.col(cols - 1) += dcurrent;

  MatrixXd& dlab = blocks_[at(kLabelEmbedding)].grad;
  MatrixXd& dpos = blocks_[at(kPosition)].grad;
  for (Eigen::Index j = 1; j < cols; ++j) {
    dlab.col(cache.memory_labels[j - 1]) += dmemory.col(j);
    dpos.col(cache.memory_positions[j - 1]) += dmemory.col(j);
  }
  encoder_.Backward(blocks_, cache.encoder, dmemory.col(0));
}

}  // namespace clarify
