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

#include "clarify/policy/baselines.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>

#include "clarify/common/errors.h"
#include "clarify/policy/recommender.h"

namespace clarify {

namespace {

constexpr double kTieTolerance = 1e-12;

// Keeps the best sequence seen; ties are resolved by reservoir sampling so
// every maximal sequence is equally likely.
class BestTracker {
 public:
  explicit BestTracker(Rng& rng) : rng_(rng) {}

  void Offer(std::span<const LabelId> seq, double reward) {
    if (ties_ == 0 || reward > best_reward_ + kTieTolerance) {
      best_.assign(seq.begin(), seq.end());
      best_reward_ = reward;
      ties_ = 1;
    } else if (reward >= best_reward_ - kTieTolerance) {
      ++ties_;
      if (UniformIndex(rng_, ties_) == 0) best_.assign(seq.begin(), seq.end());
    }
  }

  const std::vector<LabelId>& best() const { return best_; }
  double best_reward() const { return best_reward_; }

 private:
  Rng& rng_;
  std::vector<LabelId> best_;
  double best_reward_ = 0.0;
  size_t ties_ = 0;
};

void Enumerate(const QueryEvaluator& evaluator, size_t length,
               std::vector<LabelId>& path, std::vector<uint8_t>& used,
               BestTracker& best, size_t& evaluated) {
  const std::vector<LabelId>& cands = evaluator.candidates();
  if (path.size() == length) {
    best.Offer(path, evaluator.Reward(path));
    ++evaluated;
    return;
  }
  for (size_t i = 0; i < cands.size(); ++i) {
    if (used[i]) continue;
    used[i] = 1;
    path.push_back(cands[i]);
    Enumerate(evaluator, length, path, used, best, evaluated);
    path.pop_back();
    used[i] = 0;
  }
}

struct Beam {
  std::vector<LabelId> seq;
  double score;
};

}  // namespace

SupervisedTarget SupervisedTargets(const QueryEvaluator& evaluator, int n,
                                   size_t budget, Rng& rng) {
  if (n < 0) throw PreconditionError("target length must be >= 0");
  const std::vector<LabelId>& cands = evaluator.candidates();
  const size_t length = std::min<size_t>(n, cands.size());
  SupervisedTarget out;
  BestTracker best(rng);

  if (cands.size() <= kMaxExhaustiveCandidates) {
    std::vector<LabelId> path;
    std::vector<uint8_t> used(cands.size(), 0);
    Enumerate(evaluator, length, path, used, best, out.evaluated);
  } else {
    out.exhaustive = false;
    const size_t per_level = std::max<size_t>(1, length * cands.size());
    const size_t width = std::max<size_t>(1, budget / per_level);
    std::vector<Beam> beam{{{}, 0.0}};
    for (size_t depth = 0; depth < length; ++depth) {
      std::vector<Beam> next;
      for (const Beam& b : beam) {
        for (LabelId x : cands) {
          if (std::find(b.seq.begin(), b.seq.end(), x) != b.seq.end()) continue;
          Beam child{b.seq, 0.0};
          child.seq.push_back(x);
          child.score = evaluator.Reward(child.seq);
          ++out.evaluated;
          next.push_back(std::move(child));
        }
      }
      // Stable sort keeps candidate order among equal scores.
      std::stable_sort(next.begin(), next.end(),
                       [](const Beam& a, const Beam& b) {
                         return a.score > b.score;
                       });
      if (next.size() > width) next.resize(width);
      beam = std::move(next);
    }
    for (const Beam& b : beam) best.Offer(b.seq, b.score);
  }
  out.trajectory = Trajectory(best.best());
  out.reward = best.best_reward();
  return out;
}

SupervisedTarget SupervisedTargets(const Inventory& inv,
                                   const AnnotatedQuery& query, int n,
                                   const RewardConfig& reward_cfg,
                                   size_t budget, uint64_t seed) {
  const QueryEvaluator evaluator(inv, query, reward_cfg);
  Rng rng = MakeRng(seed);
  return SupervisedTargets(evaluator, n, budget, rng);
}

PolicyTrainingResult TrainSupervised(const Corpus& corpus,
                                     const SupervisedConfig& sup_cfg,
                                     const TrainConfig& train_cfg,
                                     const RewardConfig& reward_cfg,
                                     const ModelConfig& model_cfg) {
  train_cfg.Validate();
  const Inventory& inv = *corpus.inventory;
  const std::vector<const AnnotatedQuery*> train = corpus.Train();
  if (train.empty()) throw PreconditionError("training split is empty");

  PolicyTrainingResult result{
      PolicyModel(model_cfg, CorpusVocabulary(corpus),
                  static_cast<int>(inv.num_labels())),
      {}};
  PolicyModel& model = result.model;
  QuantizeToFloat(model.Blocks());

  // Targets are fixed across epochs.
  std::vector<SupervisedTarget> targets(train.size());
  std::vector<uint8_t> ok(train.size(), 0);
  ParallelFor(train.size(), train_cfg.threads, [&](size_t i) {
    const QueryEvaluator evaluator(inv, *train[i], reward_cfg);
    if (evaluator.candidates().empty()) return;
    Rng rng = MakeRng(train_cfg.seed, i);
    targets[i] = SupervisedTargets(evaluator, sup_cfg.trajectory_length,
                                   sup_cfg.budget, rng);
    ok[i] = 1;
  });

  std::vector<PolicySample> samples;
  size_t skipped = 0;
  size_t non_exhaustive = 0;
  double target_reward = 0.0;
  for (size_t i = 0; i < train.size(); ++i) {
    if (!ok[i]) {
      ++skipped;
      continue;
    }
    if (!targets[i].exhaustive) ++non_exhaustive;
    target_reward += targets[i].reward;
    const std::vector<int> tokens = model.vocab().Encode(train[i]->text());
    const QueryEvaluator evaluator(inv, *train[i], reward_cfg);
    const std::vector<LabelId>& seq = targets[i].trajectory.labels();
    for (size_t t = 0; t < seq.size(); ++t) {
      PolicySample s;
      s.tokens = tokens;
      s.history.assign(seq.begin(), seq.begin() + t);
      if (train_cfg.mask_to_candidates) {
        s.allowed = MaskOf(evaluator.candidates(), model.num_labels());
      } else {
        s.allowed.assign(model.num_labels(), 1);
      }
      for (LabelId x : s.history) s.allowed[x.index()] = 0;
      s.target.assign(model.num_labels(), 0.0);
      s.target[seq[t].index()] = 1.0;
      samples.push_back(std::move(s));
    }
  }
  if (skipped > 0) {
    spdlog::warn("supervised: skipped {} queries without candidate labels",
                 skipped);
  }
  spdlog::info("supervised targets: {} queries, {} beam-searched, mean reward {:.4f}",
               train.size() - skipped, non_exhaustive,
               target_reward / std::max<size_t>(1, train.size() - skipped));

  TrainConfig cfg = train_cfg;
  cfg.direction = KlDirection::kTargetToModel;
  SgdMomentum optimizer(cfg.learning_rate, cfg.momentum, cfg.clip_norm);
  Rng shuffle_rng = MakeRng(cfg.seed, 0x5a5a);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    EpochStats stats;
    stats.epoch = epoch;
    stats.samples = samples.size();
    stats.skipped = skipped;
    stats.selfplay_reward = target_reward /
                            std::max<size_t>(1, train.size() - skipped);
    stats.loss = FitPolicy(model, optimizer, samples, cfg, shuffle_rng);
    QuantizeToFloat(model.Blocks());
    stats.policy_reward = MeanPolicyReward(
        model, inv, train, sup_cfg.trajectory_length, reward_cfg);
    stats.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    spdlog::info("supervised epoch {}: loss {:.5f}, policy reward {:.4f}",
                 epoch, stats.loss, stats.policy_reward);
    result.log.epochs.push_back(stats);
  }
  return result;
}

std::vector<double> ClassifierTargetOf(const Inventory& inv,
                                       const AnnotatedQuery& query,
                                       ClassifierTarget target) {
  const IntentSet& potential = query.potential_intents();
  const double p = 1.0 / static_cast<double>(potential.size());
  if (target == ClassifierTarget::kIntents) {
    std::vector<double> out(inv.num_intents(), 0.0);
    for (IntentId s : potential) out[s.index()] = p;
    return out;
  }
  std::vector<double> out(inv.num_labels(), 0.0);
  double total = 0.0;
  for (LabelId x : CandidateLabels(inv, query)) {
    out[x.index()] =
        p * static_cast<double>(Intersect(inv.IntentsOf(x), potential).size());
    total += out[x.index()];
  }
  if (total == 0.0) {
    throw NoCandidatesError("query '" + query.text() +
                            "' has no candidate labels");
  }
  for (double& v : out) v /= total;
  return out;
}

double ClassifierLoss(const Classifier& model, const Inventory& inv,
                      std::span<const AnnotatedQuery* const> queries,
                      ClassifierTarget target, const TrainConfig& cfg) {
  if (queries.empty()) return 0.0;
  const std::vector<uint8_t> all(model.num_outputs(), 1);
  double total = 0.0;
  for (const AnnotatedQuery* q : queries) {
    const Eigen::VectorXd probs = model.Forward(q->text());
    const std::vector<double> t = ClassifierTargetOf(inv, *q, target);
    Eigen::VectorXd unused;
    total += KlLossAndGrad(probs, t, all, cfg.direction, cfg.smoothing, &unused);
  }
  return total / static_cast<double>(queries.size());
}

ClassifierTrainingResult TrainClassifier(const Corpus& corpus,
                                         ClassifierTarget target,
                                         const TrainConfig& train_cfg,
                                         const ModelConfig& model_cfg) {
  train_cfg.Validate();
  const Inventory& inv = *corpus.inventory;
  const std::vector<const AnnotatedQuery*> train = corpus.Train();
  if (train.empty()) throw PreconditionError("training split is empty");
  std::vector<const AnnotatedQuery*> validation = corpus.Test();
  if (validation.empty()) validation = train;

  const int outputs = static_cast<int>(target == ClassifierTarget::kIntents
                                           ? inv.num_intents()
                                           : inv.num_labels());
  ClassifierTrainingResult result{
      Classifier(model_cfg, CorpusVocabulary(corpus), outputs), {}};
  Classifier& model = result.model;
  QuantizeToFloat(model.Blocks());

  struct Sample {
    std::vector<int> tokens;
    std::vector<double> target;
  };
  std::vector<Sample> samples;
  for (const AnnotatedQuery* q : train) {
    samples.push_back(
        {model.vocab().Encode(q->text()), ClassifierTargetOf(inv, *q, target)});
  }

  SgdMomentum optimizer(train_cfg.learning_rate, train_cfg.momentum,
                        train_cfg.clip_norm);
  Rng rng = MakeRng(train_cfg.seed, 0xc1a5);
  BlockList blocks = model.Blocks();
  for (int epoch = 1; epoch <= train_cfg.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    double loss_sum = 0.0;
    size_t steps = 0;
    for (int pass = 0; pass < train_cfg.passes; ++pass) {
      Shuffle(samples, rng);
      for (size_t b = 0; b < samples.size(); b += train_cfg.batch_size) {
        const size_t len =
            std::min<size_t>(train_cfg.batch_size, samples.size() - b);
        ZeroGrads(blocks);
        double total = 0.0;
        for (size_t k = b; k < b + len; ++k) {
          total += model.Accumulate(samples[k].tokens, samples[k].target,
                                    train_cfg.direction, train_cfg.smoothing);
        }
        const double loss = total / static_cast<double>(len);
        if (!std::isfinite(loss)) {
          throw NumericalError("non-finite classifier loss at epoch " +
                               std::to_string(epoch) + ", batch offset " +
                               std::to_string(b));
        }
        for (ParamBlock* p : blocks) p->grad /= static_cast<double>(len);
        optimizer.Step(blocks);
        loss_sum += loss;
        ++steps;
      }
    }
    QuantizeToFloat(blocks);
    EpochStats stats;
    stats.epoch = epoch;
    stats.samples = samples.size();
    stats.loss = steps ? loss_sum / static_cast<double>(steps) : 0.0;
    stats.validation_loss =
        ClassifierLoss(model, inv, validation, target, train_cfg);
    stats.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    spdlog::info("classifier epoch {}: loss {:.5f}, validation KL {:.5f}",
                 epoch, stats.loss, stats.validation_loss);
    result.log.epochs.push_back(stats);
  }
  return result;
}

}  // namespace clarify
