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

#include "clarify/config/config.h"

#include <algorithm>

#include <fstream>
#include <set>

#include "clarify/common/errors.h"
#include "clarify/policy/checkpoint.h"

namespace clarify {

namespace {

using nlohmann::json;

const json& Section(const json& j, const char* key) {
  static const json kEmpty = json::object();
  auto it = j.find(key);
  if (it == j.end()) return kEmpty;
  if (!it->is_object()) {
    throw ConfigError(std::string("config section '") + key +
                      "' must be an object");
  }
  return *it;
}

}  // namespace

ExperimentConfig ExperimentConfig::FromJson(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> kKeys = {
      "seed",  "generator",  "search",     "reward",  "model",
      "train", "supervised", "classifier", "service", "comment"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  try {
    ExperimentConfig c;
    c.seed = j.value("seed", c.seed);
    c.generator = GeneratorConfig::FromJson(Section(j, "generator"));
    c.search = SearchConfig::FromJson(Section(j, "search"));
    c.reward = RewardConfig::FromJson(Section(j, "reward"));
    c.model = ModelConfig::FromJson(Section(j, "model"));
    c.train = TrainConfig::FromJson(Section(j, "train"));
    const json& sup = Section(j, "supervised");
    c.supervised.budget = sup.value("budget", c.supervised.budget);
    c.supervised.trajectory_length =
        sup.value("trajectory_length", c.supervised.trajectory_length);
    if (c.supervised.budget == 0 || c.supervised.trajectory_length < 1) {
      throw ConfigError("supervised needs budget > 0 and trajectory_length >= 1");
    }
    c.supervised_train = TrainConfig::FromJson(Section(sup, "train"), c.train);
    c.classifier_train = TrainConfig::FromJson(
        Section(Section(j, "classifier"), "train"), c.train);
    c.service = ServiceConfig::FromJson(Section(j, "service"));
    return c.WithSeed(c.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false,
                       /*ignore_comments=*/true);
  if (j.is_discarded()) throw ConfigError("config is not JSON: " + path.string());
  return FromJson(j);
}

json ExperimentConfig::ToJson() const {
  json sup = {{"budget", supervised.budget},
              {"trajectory_length", supervised.trajectory_length},
              {"train", supervised_train.ToJson()}};
  return {{"seed", seed},
          {"generator", generator.ToJson()},
          {"search", search.ToJson()},
          {"reward", reward.ToJson()},
          {"model", model.ToJson()},
          {"train", train.ToJson()},
          {"supervised", sup},
          {"classifier", {{"train", classifier_train.ToJson()}}},
          {"service", service.ToJson()}};
}

ExperimentConfig ExperimentConfig::WithSeed(uint64_t s) const {
  ExperimentConfig c = *this;
  c.seed = s;
  c.search.seed = s;
  c.model.seed = s;
  c.train.seed = s;
  c.supervised_train.seed = s;
  c.classifier_train.seed = s;
  return c;
}

const std::vector<std::string>& TrainableMethods() {
  static const std::vector<std::string> kMethods = {
      "rl", "recall_only", "id3", "supervised", "greedy", "nst"};
  return kMethods;
}

TrainedMethod TrainMethod(const std::string& method, const Corpus& corpus,
                          const ExperimentConfig& cfg,
                          const EpochCallback& on_epoch) {
  const auto& methods = TrainableMethods();
  if (std::find(methods.begin(), methods.end(), method) == methods.end()) {
    throw ConfigError("unknown method '" + method + "'");
  }
  if (!corpus.inventory) throw PreconditionError("corpus has no inventory");
  CheckpointMeta meta;
  meta.method = method;
  meta.inventory_hash = corpus.inventory->Hash();
  meta.extra = {{"corpus_seed", corpus.seed}, {"seed", cfg.seed}};

  TrainedMethod out;
  out.method = method;
  if (method == "rl" || method == "recall_only" || method == "id3") {
    RewardConfig reward = cfg.reward;
    if (method == "recall_only") reward.beta = 0.0;
    if (method == "id3") reward.convention = GainConvention::kId3;
    meta.extra["reward"] = reward.ToJson();
    meta.extra["search"] = cfg.search.ToJson();
    meta.extra["train"] = cfg.train.ToJson();
    PolicyTrainingResult r =
        TrainPolicy(corpus, cfg.search, cfg.train, reward, cfg.model, on_epoch);
    out.checkpoint = EncodePolicy(r.model, meta);
    out.log = std::move(r.log);
  } else if (method == "supervised") {
    meta.extra["reward"] = cfg.reward.ToJson();
    meta.extra["budget"] = cfg.supervised.budget;
    meta.extra["train"] = cfg.supervised_train.ToJson();
    PolicyTrainingResult r = TrainSupervised(
        corpus, cfg.supervised, cfg.supervised_train, cfg.reward, cfg.model);
    out.checkpoint = EncodePolicy(r.model, meta);
    out.log = std::move(r.log);
  } else if (method == "greedy" || method == "nst") {
    meta.extra["train"] = cfg.classifier_train.ToJson();
    ClassifierTrainingResult r = TrainClassifier(
        corpus,
        method == "greedy" ? ClassifierTarget::kIntents
                           : ClassifierTarget::kLabels,
        cfg.classifier_train, cfg.model);
    out.checkpoint = EncodeClassifier(r.model, meta);
    out.log = std::move(r.log);
  } else {
    throw ConfigError("unknown training method '" + method + "'");
  }
  return out;
}

std::unique_ptr<Recommender> RecommenderFromBytes(
    const std::string& bytes, std::shared_ptr<const Inventory> inv,
    const std::string& name) {
  return MakeRecommender(DecodeCheckpoint(bytes), std::move(inv), name);
}

}  // namespace clarify
