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

#include "clarify/policy/training.h"

#include <spdlog/spdlog.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "clarify/common/errors.h"
#include "clarify/policy/recommender.h"
#include "clarify/reward/evaluator.h"

namespace clarify {

using nlohmann::json;

void TrainConfig::Validate() const {
  if (epochs < 1) throw ConfigError("train epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (momentum < 0.0 || momentum >= 1.0) {
    throw ConfigError("momentum must be in [0, 1)");
  }
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (clip_norm < 0.0) throw ConfigError("clip norm must be >= 0");
  if (episodes_per_epoch < 0) {
    throw ConfigError("episodes_per_epoch must be >= 0");
  }
  if (passes < 1) throw ConfigError("passes must be >= 1");
  if (!(smoothing > 0.0)) throw ConfigError("smoothing must be > 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

json TrainConfig::ToJson() const {
  return {{"epochs", epochs},
          {"learning_rate", learning_rate},
          {"momentum", momentum},
          {"batch_size", batch_size},
          {"clip_norm", clip_norm},
          {"episodes_per_epoch", episodes_per_epoch},
          {"passes", passes},
          {"mask_to_candidates", mask_to_candidates},
          {"kl_direction", KlDirectionName(direction)},
          {"smoothing", smoothing},
          {"seed", seed},
          {"threads", threads}};
}

TrainConfig TrainConfig::FromJson(const json& j, const TrainConfig& base) {
  TrainConfig c = base;
  c.epochs = j.value("epochs", c.epochs);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.momentum = j.value("momentum", c.momentum);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.clip_norm = j.value("clip_norm", c.clip_norm);
  c.episodes_per_epoch = j.value("episodes_per_epoch", c.episodes_per_epoch);
  c.passes = j.value("passes", c.passes);
  c.mask_to_candidates = j.value("mask_to_candidates", c.mask_to_candidates);
  if (j.contains("kl_direction")) {
    c.direction = ParseKlDirection(j.at("kl_direction"));
  }
  c.smoothing = j.value("smoothing", c.smoothing);
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  c.Validate();
  return c;
}

json EpochStats::ToJson() const {
  return {{"epoch", epoch},
          {"selfplay_reward", selfplay_reward},
          {"policy_reward", policy_reward},
          {"loss", loss},
          {"validation_loss", validation_loss},
          {"samples", samples},
          {"skipped", skipped},
          {"seconds", seconds}};
}

json TrainLog::ToJson() const {
  json out = json::array();
  for (const EpochStats& e : epochs) out.push_back(e.ToJson());
  return out;
}

void ParallelFor(size_t n, int threads,
                 const std::function<void(size_t)>& fn) {
  const size_t workers =
      std::min<size_t>(static_cast<size_t>(std::max(threads, 1)), n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double KlTrainingStep(PolicyModel& model, SgdMomentum& optimizer,
                      std::span<const PolicySample> batch,
                      const TrainConfig& cfg) {
  if (batch.empty()) throw PreconditionError("empty training batch");
  BlockList blocks = model.Blocks();
  ZeroGrads(blocks);
  double total = 0.0;
  for (const PolicySample& s : batch) {
    total += model.Accumulate(s, cfg.direction, cfg.smoothing);
  }
  const double scale = 1.0 / static_cast<double>(batch.size());
  const double loss = total * scale;
  if (!std::isfinite(loss)) {
    std::ostringstream os;
    os << "non-finite KL loss " << loss << " over a batch of " << batch.size()
       << " samples (first query tokens: " << batch.front().tokens.size()
       << ", history length " << batch.front().history.size()
       << "); gradient norm " << GradNorm(blocks);
    throw NumericalError(os.str());
  }
  for (ParamBlock* b : blocks) b->grad *= scale;
  optimizer.Step(blocks);
  if (!AllFinite(blocks)) {
    throw NumericalError("parameters became non-finite after an update (loss " +
                         std::to_string(loss) + ")");
  }
  return loss;
}

PolicySample MakePolicySample(const PolicyModel& model,
                              const TrainingPair& pair,
                              bool mask_to_candidates) {
  PolicySample s;
  s.tokens = model.vocab().Encode(pair.query);
  s.history = pair.prefix.labels();
  const int num_labels = model.num_labels();
  if (mask_to_candidates) {
    s.allowed = MaskOf(pair.actions, num_labels);
  } else {
    s.allowed.assign(num_labels, 1);
  }
  for (LabelId x : s.history) s.allowed[x.index()] = 0;
  s.target.assign(num_labels, 0.0);
  for (size_t i = 0; i < pair.actions.size(); ++i) {
    s.target[pair.actions[i].index()] = pair.pi[i];
  }
  return s;
}

double FitPolicy(PolicyModel& model, SgdMomentum& optimizer,
                 std::vector<PolicySample>& samples, const TrainConfig& cfg,
                 Rng& rng) {
  double loss_sum = 0.0;
  size_t steps = 0;
  for (int pass = 0; pass < cfg.passes; ++pass) {
    Shuffle(samples, rng);
    for (size_t start = 0; start < samples.size(); start += cfg.batch_size) {
      const size_t len =
          std::min<size_t>(cfg.batch_size, samples.size() - start);
      loss_sum += KlTrainingStep(
          model, optimizer, std::span(samples).subspan(start, len), cfg);
      ++steps;
    }
  }
  return steps == 0 ? 0.0 : loss_sum / static_cast<double>(steps);
}

Vocabulary CorpusVocabulary(const Corpus& corpus) {
  std::vector<std::string> texts;
  for (const AnnotatedQuery* q : corpus.Train()) texts.push_back(q->text());
  return Vocabulary::Build(texts);
}

double MeanPolicyReward(const PolicyModel& model, const Inventory& inv,
                        std::span<const AnnotatedQuery* const> queries, int n,
                        const RewardConfig& reward_cfg) {
  if (queries.empty()) return 0.0;
  double total = 0.0;
  for (const AnnotatedQuery* q : queries) {
    const std::vector<int> tokens = model.vocab().Encode(q->text());
    const Trajectory tau = DecodePolicy(model, tokens, n);
    const QueryEvaluator evaluator(inv, *q, reward_cfg);
    total += evaluator.Reward(tau.labels());
  }
  return total / static_cast<double>(queries.size());
}

PolicyTrainingResult TrainPolicy(const Corpus& corpus,
                                 const SearchConfig& search_cfg,
                                 const TrainConfig& train_cfg,
                                 const RewardConfig& reward_cfg,
                                 const ModelConfig& model_cfg,
                                 const EpochCallback& on_epoch) {
  search_cfg.Validate();
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
  SgdMomentum optimizer(train_cfg.learning_rate, train_cfg.momentum,
                        train_cfg.clip_norm);
  Rng shuffle_rng = MakeRng(train_cfg.seed, 0x5a5a);

  const size_t episodes = train_cfg.episodes_per_epoch > 0
                              ? static_cast<size_t>(train_cfg.episodes_per_epoch)
                              : train.size();
  for (int epoch = 1; epoch <= train_cfg.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const uint64_t epoch_seed =
        MixSeed(MixSeed(search_cfg.seed, train_cfg.seed), epoch);
    std::vector<Episode> results(episodes);
    std::vector<uint8_t> ok(episodes, 0);
    ParallelFor(episodes, train_cfg.threads, [&](size_t i) {
      const AnnotatedQuery& q = *train[i % train.size()];
      const QueryEvaluator evaluator(inv, q, reward_cfg);
      if (evaluator.candidates().empty()) return;
      Rng rng = MakeRng(epoch_seed, i);
      results[i] = SelfPlayEpisode(evaluator, q.text(), search_cfg, rng);
      ok[i] = 1;
    });

    EpochStats stats;
    stats.epoch = epoch;
    std::vector<PolicySample> samples;
    double reward_sum = 0.0;
    size_t played = 0;
    for (size_t i = 0; i < episodes; ++i) {
      if (!ok[i]) {
        ++stats.skipped;
        continue;
      }
      ++played;
      reward_sum += results[i].reward;
      for (const TrainingPair& pair : results[i].pairs) {
        samples.push_back(
            MakePolicySample(model, pair, train_cfg.mask_to_candidates));
      }
    }
    if (stats.skipped > 0) {
      spdlog::warn("epoch {}: skipped {} queries without candidate labels",
                   epoch, stats.skipped);
    }
    stats.selfplay_reward = played ? reward_sum / played : 0.0;
    stats.samples = samples.size();
    stats.loss = FitPolicy(model, optimizer, samples, train_cfg, shuffle_rng);
    QuantizeToFloat(model.Blocks());
    stats.policy_reward = MeanPolicyReward(
        model, inv, train, search_cfg.trajectory_length, reward_cfg);
    stats.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    spdlog::info(
        "epoch {}: selfplay reward {:.4f}, policy reward {:.4f}, loss {:.5f}, "
        "{} samples, {:.1f}s",
        epoch, stats.selfplay_reward, stats.policy_reward, stats.loss,
        stats.samples, stats.seconds);
    result.log.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats, model);
  }
  return result;
}

}  // namespace clarify
