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

#ifndef CLARIFY_EVAL_SIMULATE_H_
#define CLARIFY_EVAL_SIMULATE_H_

#include <optional>
#include <string>
#include <vector>

#include "clarify/common/random.h"
#include "clarify/inventory/inventory.h"
#include "clarify/policy/recommender.h"
#include "clarify/reward/reward.h"
#include "clarify/service/retrieval.h"
#include "json.hpp"

namespace clarify {

enum class ClickModelKind {
  // Clicks a shown label whose intents contain the latent intent, uniformly
  // among such hits; none of the above when there is no hit.
  kOracle,
  // As kOracle, but a hit is clicked only with probability p.
  kNoisyOracle,
};

struct ClickModel {
  ClickModelKind kind = ClickModelKind::kOracle;
  double p = 0.9;

  static ClickModel Parse(const std::string& name, double p = 0.9);
  std::string Name() const;
};

// The simulated user. Shared by the offline simulator and the scripted
// service sessions so that both make identical choices.
std::optional<LabelId> SimulateClick(const Inventory& inv,
                                     const Trajectory& shown, IntentId latent,
                                     const ClickModel& model, Rng& rng);

struct ScriptedSession {
  size_t query_index = 0;  // into Corpus::Test()
  IntentId latent;
};

// Session i draws its query uniformly from the test split and its latent
// intent uniformly from that query's potential intents, from a stream that
// depends only on (seed, i). Every method sees the same script.
std::vector<ScriptedSession> MakeSessionScript(const Corpus& corpus,
                                               size_t sessions, uint64_t seed);

// Click randomness of session i; independent of the method.
Rng ClickRng(uint64_t seed, size_t session);

inline constexpr int kLabelsShown = 6;
inline constexpr int kIntentsShown = 3;

struct SimCounters {
  // Label lists shown and labels clicked.
  size_t t = 0;
  size_t c = 0;
  // Sessions and transfers to a human agent.
  size_t n = 0;
  size_t m = 0;

  double ctr() const { return t == 0 ? 0.0 : double(c) / double(t); }
  double tha() const { return n == 0 ? 0.0 : double(m) / double(n); }
  nlohmann::json ToJson() const;
};

struct SimRow {
  std::string method;
  SimCounters counters;
};

struct SimReport {
  std::string click_model;
  uint64_t seed = 0;
  size_t sessions = 0;
  std::vector<SimRow> rows;

  const SimRow& Row(const std::string& method) const;
  nlohmann::json ToJson() const;
  std::string ToText() const;
};

// Name of the retrieval-only row.
inline constexpr const char* kTopKIntents = "topk_intents";

// Outcome of one clarification session under the simulated user.
struct SessionOutcome {
  std::optional<LabelId> click;
  std::vector<IntentId> intents;
  bool transferred = false;
};

SessionOutcome RunSimulatedSession(const Inventory& inv,
                                   const Bm25Index& index,
                                   const Recommender& method,
                                   const std::string& query, IntentId latent,
                                   const ClickModel& model, Rng& click_rng);

// Runs every method, plus the Top-K-intents row (retrieval on the raw query,
// no labels shown), over the same session script. A session is transferred
// when its latent intent is absent from the final top 3; none of the above
// falls through to retrieval on the raw query.
SimReport SimulateOnline(const Corpus& corpus, const Bm25Index& index,
                         const std::vector<const Recommender*>& methods,
                         const ClickModel& model, size_t sessions,
                         uint64_t seed, int threads = 1);

}  // namespace clarify

#endif  // CLARIFY_EVAL_SIMULATE_H_
