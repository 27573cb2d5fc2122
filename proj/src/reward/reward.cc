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

#include "clarify/reward/reward.h"

#include <cmath>

#include "clarify/common/errors.h"

namespace clarify {

using nlohmann::json;

Trajectory::Trajectory(std::vector<LabelId> labels) {
  labels_.reserve(labels.size());
  for (LabelId x : labels) Append(x);
}

bool Trajectory::Contains(LabelId x) const {
  return std::find(labels_.begin(), labels_.end(), x) != labels_.end();
}

void Trajectory::Append(LabelId x) {
  if (Contains(x)) {
    throw PreconditionError("label " + std::to_string(x.value()) +
                            " repeated in trajectory");
  }
  labels_.push_back(x);
}

Trajectory Trajectory::Prefix(size_t n) const {
  Trajectory out;
  out.labels_.assign(labels_.begin(),
                     labels_.begin() + std::min(n, labels_.size()));
  return out;
}

GainConvention ParseGainConvention(const std::string& name) {
  if (name == "paper") return GainConvention::kPaper;
  if (name == "id3") return GainConvention::kId3;
  throw ConfigError("unknown gain convention '" + name + "'");
}

const char* GainConventionName(GainConvention convention) {
  return convention == GainConvention::kPaper ? "paper" : "id3";
}

json RewardConfig::ToJson() const {
  return {{"beta", beta}, {"convention", GainConventionName(convention)}};
}

RewardConfig RewardConfig::FromJson(const json& j) {
  RewardConfig c;
  c.beta = j.value("beta", c.beta);
  c.convention = ParseGainConvention(
      j.value("convention", std::string(GainConventionName(c.convention))));
  if (!(c.beta >= 0.0)) throw ConfigError("reward beta must be >= 0");
  return c;
}

namespace {

json IdsToJson(const IntentSet& set) {
  json out = json::array();
  for (IntentId s : set) out.push_back(s.value());
  return out;
}

}  // namespace

json RewardBreakdown::ToJson() const {
  json covers = json::array();
  for (const IntentSet& d : marginal_covers) covers.push_back(IdsToJson(d));
  return {{"covered", IdsToJson(covered)},
          {"marginal_covers", covers},
          {"step_entropies", step_entropies},
          {"base_entropy", base_entropy},
          {"info_gain", info_gain},
          {"recall_mass", recall_mass},
          {"total", total},
          {"beta", beta},
          {"convention", GainConventionName(convention)}};
}

IntentSet CoveredSet(const Inventory& inv, const AnnotatedQuery& query,
                     const Trajectory& tau) {
  IntentSet covered;
  for (LabelId x : tau.labels()) {
    covered = Union(covered, Intersect(inv.IntentsOf(x),
                                       query.potential_intents()));
  }
  return covered;
}

IntentSet MarginalCover(const Inventory& inv, const AnnotatedQuery& query,
                        const Trajectory& prefix, LabelId x) {
  if (prefix.Contains(x)) {
    throw PreconditionError("marginal cover of a label already in the prefix");
  }
  return Minus(Intersect(inv.IntentsOf(x), query.potential_intents()),
               CoveredSet(inv, query, prefix));
}

double StepEntropy(const AnnotatedQuery& query, const IntentSet& cover) {
  if (cover.size() <= 1) return 0.0;
  const auto probs = IntentProbabilities(query);
  double normalizer = 0.0;
  for (IntentId s : cover) {
    auto it = probs.find(s);
    if (it == probs.end()) {
      throw PreconditionError("cover is not a subset of the potential intents");
    }
    normalizer += it->second;
  }
  double h = 0.0;
  for (IntentId s : cover) {
    const double p = probs.at(s) / normalizer;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double BaseEntropy(const AnnotatedQuery& query) {
  double h = 0.0;
  for (const auto& [s, p] : IntentProbabilities(query)) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

RewardBreakdown TrajectoryReward(const Inventory& inv,
                                 const AnnotatedQuery& query,
                                 const Trajectory& tau,
                                 const RewardConfig& cfg) {
  RewardBreakdown out;
  out.beta = cfg.beta;
  out.convention = cfg.convention;
  out.base_entropy = BaseEntropy(query);

  Trajectory prefix;
  for (LabelId x : tau.labels()) {
    IntentSet d = MarginalCover(inv, query, prefix, x);
    out.step_entropies.push_back(StepEntropy(query, d));
    out.covered = Union(out.covered, d);
    out.marginal_covers.push_back(std::move(d));
    prefix.Append(x);
  }

  double weighted = 0.0;
  if (!out.covered.empty()) {
    const double total = static_cast<double>(out.covered.size());
    for (size_t t = 0; t < out.marginal_covers.size(); ++t) {
      weighted += static_cast<double>(out.marginal_covers[t].size()) / total *
                  out.step_entropies[t];
    }
  }
  out.info_gain = cfg.convention == GainConvention::kPaper
                      ? weighted - out.base_entropy
                      : out.base_entropy - weighted;

  const auto probs = IntentProbabilities(query);
  for (IntentId s : out.covered) out.recall_mass += probs.at(s);
  out.total = out.recall_mass + cfg.beta * out.info_gain;
  return out;
}

double InformationGain(const Inventory& inv, const AnnotatedQuery& query,
                       const Trajectory& tau, GainConvention convention) {
  RewardConfig cfg;
  cfg.convention = convention;
  return TrajectoryReward(inv, query, tau, cfg).info_gain;
}

}  // namespace clarify
