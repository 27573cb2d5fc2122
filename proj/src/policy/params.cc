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

#include "clarify/policy/params.h"

#include <cmath>

#include "clarify/common/errors.h"
#include "clarify/inventory/tokenizer.h"

namespace clarify {

void ZeroGrads(const BlockList& blocks) {
  for (ParamBlock* b : blocks) b->grad.setZero();
}

double GradNorm(const BlockList& blocks) {
  double sq = 0.0;
  for (const ParamBlock* b : blocks) sq += b->grad.squaredNorm();
  return std::sqrt(sq);
}

bool AllFinite(const BlockList& blocks) {
  for (const ParamBlock* b : blocks) {
    if (!b->value.allFinite()) return false;
  }
  return true;
}

void QuantizeToFloat(const BlockList& blocks) {
  for (ParamBlock* b : blocks) {
    b->value = b->value.cast<float>().cast<double>();
  }
}

void InitNormal(ParamBlock& block, double stddev, Rng& rng) {
  std::normal_distribution<double> normal(0.0, stddev);
  for (Eigen::Index j = 0; j < block.value.cols(); ++j) {
    for (Eigen::Index i = 0; i < block.value.rows(); ++i) {
      block.value(i, j) = normal(rng);
    }
  }
}

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(const std::vector<std::string>& tokens) {
  tokens_.push_back("<unk>");
  index_.emplace("<unk>", kUnknown);
  for (const std::string& t : tokens) {
    if (t == "<unk>") continue;
    if (index_.emplace(t, static_cast<int>(tokens_.size())).second) {
      tokens_.push_back(t);
    }
  }
}

Vocabulary Vocabulary::Build(std::span<const std::string> texts) {
  std::vector<std::string> tokens;
  for (const std::string& text : texts) {
    for (std::string& t : Tokenize(text, TokenizerScheme::kWhitespace)) {
      tokens.push_back(std::move(t));
    }
  }
  return Vocabulary(tokens);
}

int Vocabulary::Lookup(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnknown : it->second;
}

std::vector<int> Vocabulary::Encode(std::string_view text) const {
  std::vector<int> ids;
  for (const std::string& t : Tokenize(text, TokenizerScheme::kWhitespace)) {
    ids.push_back(Lookup(t));
  }
  return ids;
}

KlDirection ParseKlDirection(const std::string& name) {
  if (name == "model_to_target") return KlDirection::kModelToTarget;
  if (name == "target_to_model") return KlDirection::kTargetToModel;
  throw ConfigError("unknown KL direction '" + name + "'");
}

const char* KlDirectionName(KlDirection direction) {
  return direction == KlDirection::kModelToTarget ? "model_to_target"
                                                  : "target_to_model";
}

Eigen::VectorXd MaskedSoftmax(const Eigen::VectorXd& logits,
                              std::span<const uint8_t> allowed) {
  double max_logit = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    if (allowed[i]) max_logit = std::max(max_logit, logits[i]);
  }
  if (max_logit == -std::numeric_limits<double>::infinity()) {
    throw NoActionError("every label is masked");
  }
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(logits.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    if (!allowed[i]) continue;
    probs[i] = std::exp(logits[i] - max_logit);
    total += probs[i];
  }
  return probs / total;
}

double KlLossAndGrad(const Eigen::VectorXd& probs,
                     std::span<const double> target,
                     std::span<const uint8_t> allowed, KlDirection direction,
                     double smoothing, Eigen::VectorXd* dlogits) {
  const Eigen::Index n = probs.size();
  dlogits->setZero(n);
  if (direction == KlDirection::kTargetToModel) {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!allowed[i]) continue;
      if (target[i] > 0.0) {
        loss += target[i] * (std::log(target[i]) - std::log(probs[i]));
      }
      (*dlogits)[i] = probs[i] - target[i];
    }
    return loss;
  }

  // D_KL(z || pi~), pi~ = (pi + eps) / (1 + eps * K) over the allowed set.
  double allowed_count = 0.0;
  double target_mass = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!allowed[i]) continue;
    allowed_count += 1.0;
    target_mass += target[i];
  }
  const double norm = target_mass + smoothing * allowed_count;
  double loss = 0.0;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!allowed[i] || probs[i] <= 0.0) continue;
    const double smoothed = (target[i] + smoothing) / norm;
    g[i] = std::log(probs[i]) - std::log(smoothed);
    loss += probs[i] * g[i];
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (allowed[i]) (*dlogits)[i] = probs[i] * (g[i] - loss);
  }
  return loss;
}

SgdMomentum::SgdMomentum(double learning_rate, double momentum,
                         double clip_norm)
    : learning_rate_(learning_rate), momentum_(momentum), clip_norm_(clip_norm) {}

double SgdMomentum::Step(const BlockList& blocks) {
  if (velocity_.empty()) {
    for (const ParamBlock* b : blocks) {
      velocity_.push_back(Eigen::MatrixXd::Zero(b->value.rows(), b->value.cols()));
    }
  }
  const double norm = GradNorm(blocks);
  const double scale =
      (clip_norm_ > 0.0 && norm > clip_norm_) ? clip_norm_ / norm : 1.0;
  for (size_t i = 0; i < blocks.size(); ++i) {
    velocity_[i] = momentum_ * velocity_[i] + scale * blocks[i]->grad;
    blocks[i]->value -= learning_rate_ * velocity_[i];
  }
  return norm;
}

}  // namespace clarify
