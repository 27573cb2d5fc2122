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

#include "clarify/eval/simulate.h"

#include <fmt/format.h>

#include <algorithm>

#include "clarify/common/errors.h"
#include "clarify/policy/training.h"

namespace clarify {

ClickModel ClickModel::Parse(const std::string& name, double p) {
  ClickModel model;
  if (name == "oracle") {
    model.kind = ClickModelKind::kOracle;
  } else if (name == "noisy" || name == "noisy-oracle") {
    model.kind = ClickModelKind::kNoisyOracle;
  } else {
    throw ConfigError("unknown click model '" + name + "'");
  }
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("click probability not in [0, 1]");
  model.p = p;
  return model;
}

std::string ClickModel::Name() const {
  if (kind == ClickModelKind::kOracle) return "oracle";
  return fmt::format("noisy-oracle(p={})", p);
}

std::optional<LabelId> SimulateClick(const Inventory& inv,
                                     const Trajectory& shown, IntentId latent,
                                     const ClickModel& model, Rng& rng) {
  std::vector<LabelId> hits;
  for (LabelId x : shown.labels()) {
    if (Contains(inv.IntentsOf(x), latent)) hits.push_back(x);
  }
  if (hits.empty()) return std::nullopt;
  if (model.kind == ClickModelKind::kNoisyOracle && UniformUnit(rng) >= model.p) {
    return std::nullopt;
  }
  return hits[UniformIndex(rng, hits.size())];
}

std::vector<ScriptedSession> MakeSessionScript(const Corpus& corpus,
                                               size_t sessions, uint64_t seed) {
  const std::vector<const AnnotatedQuery*> test = corpus.Test();
  if (test.empty()) throw PreconditionError("test split is empty");
  std::vector<ScriptedSession> script(sessions);
  for (size_t i = 0; i < sessions; ++i) {
    Rng rng = MakeRng(MixSeed(seed, 0), i);
    script[i].query_index = UniformIndex(rng, test.size());
    const IntentSet& potential = test[script[i].query_index]->potential_intents();
    script[i].latent = potential[UniformIndex(rng, potential.size())];
  }
  return script;
}

Rng ClickRng(uint64_t seed, size_t session) {
  return MakeRng(MixSeed(seed, 1), session);
}

nlohmann::json SimCounters::ToJson() const {
  return {{"t", t}, {"c", c}, {"ctr", ctr()}, {"n", n}, {"m", m},
          {"tha", tha()}};
}

const SimRow& SimReport::Row(const std::string& method) const {
  for (const SimRow& row : rows) {
    if (row.method == method) return row;
  }
  throw PreconditionError("no method named '" + method + "' in report");
}

nlohmann::json SimReport::ToJson() const {
  nlohmann::json j = {{"click_model", click_model},
                      {"seed", seed},
                      {"sessions", sessions},
                      {"methods", nlohmann::json::array()}};
  for (const SimRow& row : rows) {
    nlohmann::json r = row.counters.ToJson();
    r["name"] = row.method;
    j["methods"].push_back(std::move(r));
  }
  return j;
}

std::string SimReport::ToText() const {
  size_t width = 6;
  for (const SimRow& row : rows) width = std::max(width, row.method.size());
  std::string out = fmt::format("{:<{}}  {:>7}  {:>7}  {:>7}  {:>7}  {:>7}  {:>7}\n",
                                "method", width, "t", "c", "CTR", "n", "m", "THA");
  for (const SimRow& row : rows) {
    const SimCounters& k = row.counters;
    out += fmt::format("{:<{}}  {:>7}  {:>7}  {:>7.4f}  {:>7}  {:>7}  {:>7.4f}\n",
                       row.method, width, k.t, k.c, k.ctr(), k.n, k.m, k.tha());
  }
  out += fmt::format("click model {}, seed {}, sessions {}\n", click_model,
                     seed, sessions);
  return out;
}

namespace {

bool InTop(const std::vector<IntentId>& ids, IntentId id) {
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

std::vector<IntentId> TopIntents(const Bm25Index& index,
                                 const std::string& query) {
  std::vector<IntentId> out;
  for (const ScoredIntent& s : index.Retrieve(query, kIntentsShown).intents) {
    out.push_back(s.id);
  }
  return out;
}

}  // namespace

SessionOutcome RunSimulatedSession(const Inventory& inv,
                                   const Bm25Index& index,
                                   const Recommender& method,
                                   const std::string& query, IntentId latent,
                                   const ClickModel& model, Rng& click_rng) {
  SessionOutcome out;
  const Trajectory shown = method.Recommend(query, kLabelsShown);
  out.click = SimulateClick(inv, shown, latent, model, click_rng);
  const std::string retrieval_query =
      out.click ? ConcatenateQuery(query, inv.label(*out.click).phrase) : query;
  out.intents = TopIntents(index, retrieval_query);
  out.transferred = !InTop(out.intents, latent);
  return out;
}

SimReport SimulateOnline(const Corpus& corpus, const Bm25Index& index,
                         const std::vector<const Recommender*>& methods,
                         const ClickModel& model, size_t sessions,
                         uint64_t seed, int threads) {
  const Inventory& inv = *corpus.inventory;
  const std::vector<const AnnotatedQuery*> test = corpus.Test();
  const std::vector<ScriptedSession> script =
      MakeSessionScript(corpus, sessions, seed);

  SimReport report;
  report.click_model = model.Name();
  report.seed = seed;
  report.sessions = sessions;

  for (const Recommender* method : methods) {
    std::vector<SessionOutcome> outcomes(sessions);
    ParallelFor(sessions, threads, [&](size_t i) {
      Rng rng = ClickRng(seed, i);
      outcomes[i] = RunSimulatedSession(
          inv, index, *method, test[script[i].query_index]->text(),
          script[i].latent, model, rng);
    });
    SimRow row{method->name(), {}};
    for (const SessionOutcome& o : outcomes) {
      ++row.counters.t;
      if (o.click) ++row.counters.c;
      ++row.counters.n;
      if (o.transferred) ++row.counters.m;
    }
    report.rows.push_back(std::move(row));
  }

  SimRow topk{kTopKIntents, {}};
  for (size_t i = 0; i < sessions; ++i) {
    const std::vector<IntentId> intents =
        TopIntents(index, test[script[i].query_index]->text());
    ++topk.counters.n;
    if (!InTop(intents, script[i].latent)) ++topk.counters.m;
  }
  report.rows.push_back(std::move(topk));
  return report;
}

}  // namespace clarify
