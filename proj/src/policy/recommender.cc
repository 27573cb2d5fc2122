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

#include "clarify/policy/recommender.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <numeric>

#include "clarify/common/errors.h"

namespace clarify {

int ClipLength(int n, int limit) {
  if (n < 0) throw PreconditionError("recommendation length must be >= 0");
  if (n > limit) {
    spdlog::warn("requested {} labels but only {} exist; clipping", n, limit);
    return limit;
  }
  return n;
}

Trajectory DecodePolicy(const PolicyModel& model, std::span<const int> tokens,
                        int n) {
  n = ClipLength(n, model.num_labels());
  const std::vector<uint8_t> allowed(model.num_labels(), 1);
  Trajectory tau;
  for (int t = 0; t < n; ++t) {
    const Eigen::VectorXd probs = model.Forward(tokens, tau.labels(), allowed);
    int best = -1;
    for (int i = 0; i < model.num_labels(); ++i) {
      if (tau.Contains(LabelId(i))) continue;
      if (best < 0 || probs[i] > probs[best]) best = i;
    }
    tau.Append(LabelId(best));
  }
  return tau;
}

Trajectory Recommend(const PolicyModel& model, std::string_view query, int n) {
  if (n < 1) throw PreconditionError("recommend needs n >= 1");
  const std::vector<int> tokens = model.vocab().Encode(query);
  return DecodePolicy(model, tokens, n);
}

Trajectory GreedyCoverDecode(const Inventory& inv,
                             std::span<const double> intent_scores, int n) {
  n = ClipLength(n, static_cast<int>(inv.num_labels()));
  std::vector<uint8_t> covered(inv.num_intents(), 0);
  Trajectory tau;
  for (int t = 0; t < n; ++t) {
    int best = -1;
    double best_score = 0.0;
    for (size_t i = 0; i < inv.num_labels(); ++i) {
      const LabelId x(static_cast<int32_t>(i));
      if (tau.Contains(x)) continue;
      double score = 0.0;
      for (IntentId s : inv.IntentsOf(x)) {
        if (!covered[s.index()]) score += intent_scores[s.index()];
      }
      if (best < 0 || score > best_score) {
        best = static_cast<int>(i);
        best_score = score;
      }
    }
    const LabelId pick(best);
    tau.Append(pick);
    for (IntentId s : inv.IntentsOf(pick)) covered[s.index()] = 1;
  }
  return tau;
}

Trajectory TopNDecode(std::span<const double> label_scores, int n) {
  n = ClipLength(n, static_cast<int>(label_scores.size()));
  std::vector<int> order(label_scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return label_scores[a] > label_scores[b];
  });
  Trajectory tau;
  for (int t = 0; t < n; ++t) tau.Append(LabelId(order[t]));
  return tau;
}

Trajectory PolicyRecommender::Recommend(std::string_view query, int n) const {
  return clarify::Recommend(model_, query, n);
}

GreedyRecommender::GreedyRecommender(std::string name, Classifier model,
                                     std::shared_ptr<const Inventory> inv)
    : name_(std::move(name)), model_(std::move(model)), inv_(std::move(inv)) {
  if (static_cast<size_t>(model_.num_outputs()) != inv_->num_intents()) {
    throw ValidationError("greedy classifier has " +
                          std::to_string(model_.num_outputs()) +
                          " outputs but the inventory has " +
                          std::to_string(inv_->num_intents()) + " intents");
  }
}

Trajectory GreedyRecommender::Recommend(std::string_view query, int n) const {
  const Eigen::VectorXd f = model_.Forward(query);
  return GreedyCoverDecode(*inv_, {f.data(), static_cast<size_t>(f.size())},
                           n);
}

Trajectory NstRecommender::Recommend(std::string_view query, int n) const {
  const Eigen::VectorXd p = model_.Forward(query);
  return TopNDecode({p.data(), static_cast<size_t>(p.size())}, n);
}

Trajectory RandomRecommender::Recommend(std::string_view query, int n) const {
  n = ClipLength(n, num_labels_);
  Rng rng = MakeRng(
      seed_, Fnv1a({reinterpret_cast<const uint8_t*>(query.data()),
                    query.size()}));
  std::vector<int> ids(num_labels_);
  std::iota(ids.begin(), ids.end(), 0);
  Shuffle(ids, rng);
  Trajectory tau;
  for (int t = 0; t < n; ++t) tau.Append(LabelId(ids[t]));
  return tau;
}

std::unique_ptr<Recommender> MakeRecommender(
    const Checkpoint& ckpt, std::shared_ptr<const Inventory> inv,
    std::string name) {
  if (ckpt.inventory_hash() != inv->Hash()) {
    throw ValidationError("checkpoint '" + name +
                          "' was trained on a different inventory (hash " +
                          HexHash(ckpt.inventory_hash()) + " vs " +
                          HexHash(inv->Hash()) + ")");
  }
  const std::string method = ckpt.method();
  if (ckpt.kind() == "policy") {
    PolicyModel model = PolicyFromCheckpoint(ckpt);
    if (static_cast<size_t>(model.num_labels()) != inv->num_labels()) {
      throw ValidationError("policy label count differs from the inventory");
    }
    return std::make_unique<PolicyRecommender>(std::move(name),
                                               std::move(model));
  }
  Classifier model = ClassifierFromCheckpoint(ckpt);
  if (method == "greedy") {
    return std::make_unique<GreedyRecommender>(std::move(name),
                                               std::move(model), inv);
  }
  if (method == "nst") {
    if (static_cast<size_t>(model.num_outputs()) != inv->num_labels()) {
      throw ValidationError("nst classifier label count differs from the inventory");
    }
    return std::make_unique<NstRecommender>(std::move(name), std::move(model));
  }
  throw ParseError("unknown classifier method '" + method + "'");
}

}  // namespace clarify
