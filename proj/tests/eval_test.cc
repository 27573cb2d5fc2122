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

#include <gtest/gtest.h>

#include "clarify/common/errors.h"
#include "clarify/eval/metrics.h"
#include "clarify/eval/offline.h"
#include "clarify/eval/simulate.h"
#include "clarify/inventory/generator.h"
#include "clarify/policy/recommender.h"
#include "clarify/service/retrieval.h"
#include "support/fixtures.h"
#include "support/oracles.h"

namespace clarify {
namespace {

using testing::F1Inventory;
using testing::F1Query;
using testing::kApply;
using testing::kCancel;
using testing::kCreditCard;
using testing::kLoan;
using testing::kQrCode;

// Always shows the same labels, cut to the requested length.
class FixedRecommender : public Recommender {
 public:
  FixedRecommender(std::string name, Trajectory tau)
      : name_(std::move(name)), tau_(std::move(tau)) {}
  std::string name() const override { return name_; }
  Trajectory Recommend(std::string_view, int n) const override {
    return tau_.Prefix(std::min<size_t>(n, tau_.size()));
  }

 private:
  std::string name_;
  Trajectory tau_;
};

TEST(Recall, UnionAndSumVariants) {
  auto inv = F1Inventory();
  const Trajectory tau({kApply, kCreditCard});
  EXPECT_DOUBLE_EQ(RecallAtN(*inv, F1Query(), tau, RecallVariant::kUnion), 1.0);
  EXPECT_DOUBLE_EQ(RecallAtN(*inv, F1Query(), tau, RecallVariant::kSum), 4.0 / 3.0);
  EXPECT_EQ(RecallAtN(*inv, F1Query(), Trajectory({kCancel}), RecallVariant::kUnion), 0.0);
  EXPECT_DOUBLE_EQ(RecallAtN(*inv, F1Query(), Trajectory({kLoan}), RecallVariant::kUnion),
                   1.0 / 3.0);
  EXPECT_THROW(ParseRecallVariant("max"), ConfigError);
}

TEST(UpperBound, BroadLabelReachesOne) {
  const UpperBound ub = UpperBoundAtN(*F1Inventory(), F1Query(), 1);
  EXPECT_TRUE(ub.exact);
  EXPECT_DOUBLE_EQ(ub.ratio, 1.0);
  EXPECT_EQ(ub.covered, 3);
}

TEST(UpperBound, WithoutTheBroadLabel) {
  // F1 restricted to {credit card, loan, cancel}.
  const Inventory inv(F1Inventory()->intents(),
                      {{LabelId(0), "credit card"}, {LabelId(1), "loan"}, {LabelId(2), "cancel"}},
                      {{IntentId(0), IntentId(3)}, {IntentId(1)}, {IntentId(3)}});
  const UpperBound ub = UpperBoundAtN(inv, F1Query(), 2);
  EXPECT_DOUBLE_EQ(ub.ratio, 2.0 / 3.0);
  EXPECT_EQ(ub.covered, testing::OracleMaxCoverage(inv, F1Query(), 2));
  EXPECT_EQ(UpperBoundAtN(inv, F1Query(), 0).ratio, 0.0);
}

TEST(Complementarity, Diversity) {
  auto inv = F1Inventory();
  EXPECT_DOUBLE_EQ(Diversity(Trajectory({kCreditCard, kLoan, kQrCode}), *inv,
                             TokenizerScheme::kWhitespace),
                   1.0);
  const Inventory repeats({{IntentId(0), "apply card", "a"}},
                          {{LabelId(0), "apply"}, {LabelId(1), "apply card"}},
                          {{IntentId(0)}, {IntentId(0)}});
  EXPECT_DOUBLE_EQ(Diversity(Trajectory({LabelId(0), LabelId(1)}), repeats,
                             TokenizerScheme::kWhitespace),
                   2.0 / 3.0);
  EXPECT_THROW(Diversity(Trajectory(), *inv, TokenizerScheme::kWhitespace),
               PreconditionError);
}

TEST(Complementarity, Overlap) {
  auto inv = F1Inventory();
  EXPECT_DOUBLE_EQ(Overlap(Trajectory({kApply, kCreditCard}), "how to apply", *inv,
                           TokenizerScheme::kWhitespace),
                   1.0 / 3.0);
  EXPECT_EQ(Overlap(Trajectory({kLoan, kQrCode}), "how to apply", *inv,
                    TokenizerScheme::kWhitespace),
            0.0);
}

TEST(OfflineEval, ReportOnF1) {
  const Corpus corpus = testing::F1Corpus();
  const FixedRecommender broad("broad", Trajectory({kApply, kCreditCard, kLoan}));
  const FixedRecommender narrow("narrow", Trajectory({kCreditCard, kLoan, kQrCode}));
  OfflineEvalConfig cfg;
  cfg.n_values = {1, 3};
  cfg.complementarity_n = 3;
  const OfflineReport r = RunOfflineEval(corpus, {&broad, &narrow}, cfg);
  EXPECT_EQ(r.upper_bound, (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(r.Method("broad").union_recall, (std::vector<double>{1.0, 1.0}));
  EXPECT_DOUBLE_EQ(r.Method("broad").sum_recall[1], 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.Method("narrow").union_recall[0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.Method("narrow").diversity, 1.0);
  EXPECT_DOUBLE_EQ(r.Method("broad").overlap, 1.0 / 4.0);
  EXPECT_THROW(r.Method("missing"), PreconditionError);
  ASSERT_EQ(r.queries.size(), 1u);
  EXPECT_EQ(r.queries[0].num_candidates, 4u);
  EXPECT_NE(r.ToText().find("broad"), std::string::npos);
}

TEST(OfflineEval, ReportIsIndependentOfThreadCount) {
  GeneratorConfig gen;
  gen.num_intents = 40;
  gen.num_labels = 24;
  gen.num_queries = 80;
  gen.num_actions = 4;
  gen.num_products = 10;
  const Corpus corpus = GenerateBenchmark(gen, 3).corpus;
  const RandomRecommender rec("random", 24, 9);
  OfflineEvalConfig one;
  OfflineEvalConfig four;
  four.threads = 4;
  const std::string a = RunOfflineEval(corpus, {&rec}, one).ToJson().dump();
  const std::string b = RunOfflineEval(corpus, {&rec}, four).ToJson().dump();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, RunOfflineEval(corpus, {&rec}, one).ToJson().dump());
}

TEST(OfflineEval, RejectsBadConfig) {
  const FixedRecommender broad("broad", Trajectory({kApply}));
  OfflineEvalConfig cfg;
  cfg.n_values = {};
  EXPECT_THROW(RunOfflineEval(testing::F1Corpus(), {&broad}, cfg), ConfigError);
  cfg.n_values = {0};
  EXPECT_THROW(RunOfflineEval(testing::F1Corpus(), {&broad}, cfg), ConfigError);
}

TEST(ClickModel, OracleClicksAShownLabelCoveringTheLatentIntent) {
  auto inv = F1Inventory();
  Rng rng = MakeRng(1);
  const ClickModel oracle = ClickModel::Parse("oracle");
  EXPECT_EQ(SimulateClick(*inv, Trajectory({kApply, kLoan}), IntentId(2), oracle, rng),
            kApply);
  EXPECT_EQ(SimulateClick(*inv, Trajectory({kLoan, kCancel}), IntentId(2), oracle, rng),
            std::nullopt);
  int loan = 0;
  for (int i = 0; i < 200; ++i) {
    const auto c = SimulateClick(*inv, Trajectory({kApply, kLoan}), IntentId(1), oracle, rng);
    ASSERT_TRUE(c.has_value());
    loan += *c == kLoan;
  }
  EXPECT_GT(loan, 60);
  EXPECT_LT(loan, 140);
}

TEST(ClickModel, NoisyOracleSkipsWithProbabilityOneMinusP) {
  auto inv = F1Inventory();
  Rng rng = MakeRng(2);
  const ClickModel noisy = ClickModel::Parse("noisy", 0.7);
  int clicks = 0;
  for (int i = 0; i < 2000; ++i) {
    clicks += SimulateClick(*inv, Trajectory({kApply}), IntentId(0), noisy, rng).has_value();
  }
  EXPECT_NEAR(clicks / 2000.0, 0.7, 0.05);
  EXPECT_THROW(ClickModel::Parse("random"), ConfigError);
  EXPECT_THROW(ClickModel::Parse("noisy", 1.5), ConfigError);
}

TEST(Simulation, CountersFollowTheSessionOutcomes) {
  const Corpus corpus = testing::F1Corpus();
  const Bm25Index index(corpus.inventory);
  // Shows "cancel" only: nothing is ever clicked, retrieval runs on the raw query.
  const FixedRecommender useless("useless", Trajectory({kCancel}));
  const FixedRecommender broad("broad", Trajectory({kApply}));
  const SimReport r = SimulateOnline(corpus, index, {&useless, &broad},
                                     ClickModel::Parse("oracle"), 50, 3);
  const SimCounters& u = r.Row("useless").counters;
  EXPECT_EQ(u.t, 50u);
  EXPECT_EQ(u.c, 0u);
  EXPECT_EQ(u.n, 50u);
  const SimCounters& b = r.Row("broad").counters;
  EXPECT_EQ(b.c, 50u);
  EXPECT_DOUBLE_EQ(b.ctr(), 1.0);
  const SimCounters& top = r.Row(kTopKIntents).counters;
  EXPECT_EQ(top.t, 0u);
  EXPECT_EQ(top.n, 50u);
  EXPECT_LE(top.m, top.n);
}

TEST(Simulation, SessionScriptDrawsLatentIntentsFromTheQuery) {
  const Corpus corpus = testing::F1Corpus();
  const std::vector<ScriptedSession> script = MakeSessionScript(corpus, 300, 5);
  std::set<int> seen;
  for (const ScriptedSession& s : script) {
    EXPECT_EQ(s.query_index, 0u);
    EXPECT_TRUE(Contains(F1Query().potential_intents(), s.latent));
    seen.insert(s.latent.value());
  }
  EXPECT_EQ(seen.size(), 3u);
  const std::vector<ScriptedSession> again = MakeSessionScript(corpus, 300, 5);
  for (size_t i = 0; i < script.size(); ++i) EXPECT_EQ(script[i].latent, again[i].latent);
}

TEST(Simulation, TransferWhenTheLatentIntentIsNotShown) {
  auto inv = F1Inventory();
  const Bm25Index index(inv);
  const FixedRecommender cc("cc", Trajectory({kCreditCard}));
  Rng rng = MakeRng(1);
  // Clicking "credit card" narrows retrieval to the credit card intents.
  const SessionOutcome hit = RunSimulatedSession(*inv, index, cc, "how to apply",
                                                 IntentId(0), ClickModel(), rng);
  EXPECT_EQ(hit.click, kCreditCard);
  EXPECT_FALSE(hit.transferred);
  EXPECT_EQ(hit.intents.size(), 3u);
  EXPECT_EQ(hit.intents[0], IntentId(0));
}

}  // namespace
}  // namespace clarify
