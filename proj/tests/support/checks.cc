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

#include "support/checks.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <set>

#include <unistd.h>

#include "clarify/eval/metrics.h"
#include "clarify/eval/simulate.h"
#include "clarify/inventory/generator.h"
#include "clarify/inventory/tokenizer.h"
#include "clarify/policy/baselines.h"
#include "clarify/policy/classifier.h"
#include "clarify/policy/policy_model.h"
#include "clarify/policy/recommender.h"
#include "clarify/policy/training.h"
#include "clarify/reward/evaluator.h"
#include "clarify/search/search.h"
#include "clarify/service/event_log.h"
#include "clarify/service/retrieval.h"
#include "clarify/service/session.h"
#include "support/fixtures.h"
#include "support/oracles.h"

namespace clarify::testing {

namespace {

using Failure = std::optional<std::string>;

RewardConfig Reward(double beta, GainConvention convention) {
  RewardConfig cfg;
  cfg.beta = beta;
  cfg.convention = convention;
  return cfg;
}

std::string Str(const Trajectory& tau) {
  std::string out = "(";
  for (size_t i = 0; i < tau.size(); ++i) {
    out += (i ? "," : "") + std::to_string(tau[i].value());
  }
  return out + ")";
}

}  // namespace

CheckResult CheckRewardOracle(size_t cases, uint64_t seed) {
  double worst = 0.0;
  size_t bad = 0;
  for (GainConvention convention : {GainConvention::kPaper, GainConvention::kId3}) {
    for (size_t i = 0; i < cases; ++i) {
      Rng rng = MakeRng(seed, i);
      auto inv = RandomInventory(rng);
      const AnnotatedQuery q = RandomQuery(rng, *inv);
      const Trajectory tau = RandomTrajectory(rng, *inv, 8);
      const double beta = UniformUnit(rng) * 2.0;
      const double got = TrajectoryReward(*inv, q, tau, Reward(beta, convention)).total;
      const double want = OracleReward(*inv, q, tau.labels(), beta, convention).total;
      const double err = std::abs(got - want);
      worst = std::max(worst, err);
      if (!(err <= 1e-9)) ++bad;
    }
  }
  return {bad == 0, fmt::format("{} instances x 2 conventions, max |err| {:.2e}, "
                                "{} over 1e-9", cases, worst, bad)};
}

CheckResult CheckF1Rewards() {
  auto inv = F1Inventory();
  const AnnotatedQuery q = F1Query();
  const double ln3 = std::log(3.0);
  struct Case {
    Trajectory tau;
    GainConvention convention;
    double want;
  };
  const std::vector<Case> cases = {
      {Trajectory({kApply}), GainConvention::kPaper, 1.0},
      {Trajectory({kApply}), GainConvention::kId3, 1.0},
      {Trajectory({kCreditCard, kLoan, kQrCode}), GainConvention::kPaper, 1.0 - ln3},
      {Trajectory({kCreditCard, kLoan, kQrCode}), GainConvention::kId3, 1.0 + ln3},
      {Trajectory({kCancel}), GainConvention::kPaper, -ln3},
  };
  double worst = 0.0;
  for (const Case& c : cases) {
    const double got = TrajectoryReward(*inv, q, c.tau, Reward(1.0, c.convention)).total;
    worst = std::max(worst, std::abs(got - c.want));
  }
  return {worst <= 1e-12,
          fmt::format("{} fixture values, max |err| {:.2e}", cases.size(), worst)};
}

CheckResult CheckMctsVsExhaustive(size_t instances, uint64_t seed,
                                  GainConvention convention) {
  size_t hits = 0;
  for (size_t i = 0; i < instances; ++i) {
    Rng rng = MakeRng(seed, i);
    const SearchInstance inst = RandomSearchInstance(rng, 3, 8);
    SearchConfig cfg;
    cfg.simulations = 2000;
    cfg.trajectory_length = 3;
    cfg.seed = MixSeed(seed, i);
    const RewardConfig reward = Reward(1.0, convention);
    const SearchResult found =
        RunSearch(*inst.inv, inst.query, Trajectory(), cfg, reward);
    const OracleBest best = OracleBestTrajectory(*inst.inv, inst.query, 3, 1.0,
                                                 convention);
    if (found.policy.best_reward >= best.reward - 1e-9) ++hits;
  }
  const size_t needed = (instances * 95 + 99) / 100;
  return {hits >= needed,
          fmt::format("{} convention: optimum reached on {}/{} instances (need {})",
                      GainConventionName(convention), hits, instances, needed)};
}

namespace {

using LossFn = std::function<double()>;

// Central differences against the analytic gradient already in `blocks`.
void CompareBlocks(const std::string& model, std::vector<ParamBlock>& blocks,
                   const LossFn& loss, std::vector<GradientReport>& out) {
  const double h = 1e-5;
  std::vector<Eigen::MatrixXd> analytic;
  for (const ParamBlock& b : blocks) analytic.push_back(b.grad);
  for (size_t k = 0; k < blocks.size(); ++k) {
    ParamBlock& b = blocks[k];
    Eigen::MatrixXd numeric = Eigen::MatrixXd::Zero(b.value.rows(), b.value.cols());
    for (Eigen::Index i = 0; i < b.value.size(); ++i) {
      const double saved = b.value.data()[i];
      b.value.data()[i] = saved + h;
      const double up = loss();
      b.value.data()[i] = saved - h;
      const double down = loss();
      b.value.data()[i] = saved;
      numeric.data()[i] = (up - down) / (2.0 * h);
    }
    const double diff = (analytic[k] - numeric).norm();
    const double scale = std::max(analytic[k].norm(), numeric.norm());
    GradientReport r{model, b.name, scale < 1e-10 ? diff : diff / scale,
                     analytic[k].norm()};
    out.push_back(r);
  }
}

ModelConfig ToyConfig(EncoderKind encoder, uint64_t seed) {
  ModelConfig cfg;
  cfg.dim = 8;
  cfg.heads = 2;
  cfg.max_positions = 4;
  cfg.encoder = encoder;
  cfg.zero_output_init = false;
  cfg.embedding_std = 0.5;
  cfg.seed = seed;
  return cfg;
}

Vocabulary ToyVocab() {
  const std::vector<std::string> texts = {"how to apply for a credit card",
                                          "cancel my loan", "qr code fee"};
  return Vocabulary::Build(texts);
}

std::vector<double> RandomTarget(Rng& rng, const std::vector<uint8_t>& allowed) {
  std::vector<double> t(allowed.size(), 0.0);
  double z = 0.0;
  for (size_t i = 0; i < t.size(); ++i) {
    if (allowed[i]) {
      t[i] = 0.05 + UniformUnit(rng);
      z += t[i];
    }
  }
  for (double& v : t) v /= z;
  return t;
}

}  // namespace

std::vector<GradientReport> RunGradientChecks(uint64_t seed) {
  std::vector<GradientReport> out;
  const int num_labels = 6;
  const Vocabulary vocab = ToyVocab();
  const std::vector<int> tokens = vocab.Encode("how to apply for a loan");

  for (EncoderKind encoder : {EncoderKind::kMlp, EncoderKind::kAttention}) {
    for (KlDirection direction :
         {KlDirection::kModelToTarget, KlDirection::kTargetToModel}) {
      Rng rng = MakeRng(seed, out.size());
      PolicyModel model(ToyConfig(encoder, seed), vocab, num_labels);
      PolicySample sample;
      sample.tokens = tokens;
      sample.history = {LabelId(3), LabelId(1)};
      sample.allowed = {1, 0, 1, 0, 1, 1};
      sample.target = RandomTarget(rng, sample.allowed);
      // Smoothing large enough that the reverse direction stays well scaled.
      const double smoothing = 1e-3;
      ZeroGrads(model.Blocks());
      model.Accumulate(sample, direction, smoothing);
      LossFn loss = [&]() {
        PolicyModel copy = model;
        return copy.Accumulate(sample, direction, smoothing);
      };
      CompareBlocks(fmt::format("policy/{}/{}",
                                encoder == EncoderKind::kMlp ? "mlp" : "attention",
                                KlDirectionName(direction)),
                    model.blocks(), loss, out);
    }
  }

  for (int head = 0; head < 2; ++head) {
    Rng rng = MakeRng(seed, 100 + head);
    const int outputs = head == 0 ? 5 : 7;  // intents, labels
    Classifier model(ToyConfig(EncoderKind::kMlp, seed), vocab, outputs);
    const std::vector<uint8_t> all(outputs, 1);
    const std::vector<double> target = RandomTarget(rng, all);
    ZeroGrads(model.Blocks());
    model.Accumulate(tokens, target, KlDirection::kModelToTarget, 1e-3);
    LossFn loss = [&]() {
      Classifier copy = model;
      return copy.Accumulate(tokens, target, KlDirection::kModelToTarget, 1e-3);
    };
    CompareBlocks(head == 0 ? "classifier/intents" : "classifier/labels",
                  model.blocks(), loss, out);
  }
  return out;
}

CheckResult CheckGradients(uint64_t seed) {
  const std::vector<GradientReport> reports = RunGradientChecks(seed);
  double worst = 0.0;
  std::string where;
  size_t bad = 0;
  for (const GradientReport& r : reports) {
    if (r.relative_error > worst) {
      worst = r.relative_error;
      where = r.model + ":" + r.block;
    }
    if (!(r.relative_error <= kGradientTolerance)) ++bad;
  }
  return {bad == 0 && !reports.empty(),
          fmt::format("{} blocks, max relative error {:.2e} ({}), {} over {:.0e}",
                      reports.size(), worst, where, bad, kGradientTolerance)};
}

// --- Property suite ---------------------------------------------------------

namespace {

std::vector<PropertyResult> InventoryProperties(size_t n, uint64_t seed) {
  std::vector<PropertyResult> out;
  out.push_back(CheckProperty(
      "inventory: candidate labels match a full scan", n, MixSeed(seed, 1),
      [](Rng& rng, size_t) -> Failure {
        auto inv = RandomInventory(rng);
        const AnnotatedQuery q = RandomQuery(rng, *inv);
        if (CandidateLabels(*inv, q) != OracleCandidates(*inv, q)) {
          return "candidate set differs";
        }
        return std::nullopt;
      }));
  out.push_back(CheckProperty(
      "inventory: intent probabilities are a distribution", n, MixSeed(seed, 2),
      [](Rng& rng, size_t) -> Failure {
        auto inv = RandomInventory(rng);
        const AnnotatedQuery q = RandomQuery(rng, *inv);
        double sum = 0.0;
        for (const auto& [s, p] : IntentProbabilities(q)) {
          if (p < 0.0 || !Contains(q.potential_intents(), s)) return "bad mass";
          sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12) return fmt::format("sum {}", sum);
        return std::nullopt;
      }));
  out.push_back(CheckProperty(
      "inventory: generator is a pure function of (cfg, seed)", n,
      MixSeed(seed, 3), [](Rng& rng, size_t) -> Failure {
        GeneratorConfig cfg;
        cfg.num_actions = 3;
        cfg.num_products = 4;
        cfg.num_labels = 10;
        cfg.num_intents = 12;
        cfg.num_queries = 12;
        const uint64_t s = rng();
        const Benchmark a = GenerateBenchmark(cfg, s);
        const Benchmark b = GenerateBenchmark(cfg, s);
        if (!(*a.corpus.inventory == *b.corpus.inventory) ||
            a.corpus.queries != b.corpus.queries) {
          return "two runs differ";
        }
        return std::nullopt;
      }));
  out.push_back(CheckProperty(
      "inventory: JSON round trip is the identity", n, MixSeed(seed, 4),
      [](Rng& rng, size_t) -> Failure {
        auto inv = RandomInventory(rng);
        if (!(InventoryFromJson(InventoryToJson(*inv)) == *inv)) {
          return "round trip changed the inventory";
        }
        return std::nullopt;
      }));
  return out;
}

std::vector<PropertyResult> RewardProperties(size_t n, uint64_t seed) {
  std::vector<PropertyResult> out;
  out.push_back(CheckProperty(
      "reward: marginal covers are disjoint and union to S", n, MixSeed(seed, 10),
      [](Rng& rng, size_t) -> Failure {
        auto inv = RandomInventory(rng);
        const AnnotatedQuery q = RandomQuery(rng, *inv);
        const Trajectory tau = RandomTrajectory(rng, *inv, 8);
        const RewardBreakdown r = TrajectoryReward(*inv, q, tau, {});
        IntentSet all;
        size_t total = 0;
        for (const IntentSet& d : r.marginal_covers) {
          if (Intersects(all, d)) return "overlapping covers " + Str(tau);
          all = Union(all, d);
          total += d.size();
        }
        if (all != r.covered || all != CoveredSet(*inv, q, tau) ||
            total != all.size()) {
          return "union differs from S " + Str(tau);
        }
        return std::nullopt;
      }));
  out.push_back(CheckProperty(
      "reward: recall mass is permutation invariant", n, MixSeed(seed, 11),
      [](Rng& rng, size_t) -> Failure {
        auto inv = RandomInventory(rng);
        const AnnotatedQuery q = RandomQuery(rng, *inv);
        const Trajectory tau = RandomTrajectory(rng, *inv, 8);
        std::vector<LabelId> perm = tau.labels();
        Shuffle(perm, rng);
        const double a = TrajectoryReward(*inv, q, tau, {}).recall_mass;
        const double b = TrajectoryReward(*inv, q, Trajectory(perm), {}).recall_mass;
        if (std::abs(a - b) > 1e-12) return fmt::format("{} vs {}", a, b);
        return std::nullopt;
      }));
  out.push_back(CheckProperty(
      "reward: appending a label never lowers recall mass", n, MixSeed(seed, 12),
      [](Rng& rng, size_t) -> Failure {
        auto inv = RandomInventory(rng);
        const AnnotatedQuery q = RandomQuery(rng, *inv);
        Trajectory tau = RandomTrajectory(rng, *inv, 6);
        if (tau.size() == inv->num_labels()) return std::nullopt;
        const double before = TrajectoryReward(*inv, q, tau, {}).recall_mass;
        LabelId x;
        do {
          x = LabelId(static_cast<int32_t>(UniformIndex(rng, inv->num_labels())));
        } while (tau.Contains(x));
        tau.Append(x);
        const double after = TrajectoryReward(*inv, q, tau, {}).recall_mass;
        if (after < before - 1e-15) return fmt::format("{} -> {}", before, after);
        return std::nullopt;
      }));
  out.push_back(CheckProperty(
      "reward: gain bounds under uniform P", n, MixSeed(seed, 13),
      [](Rng& rng, size_t) -> Failure {
        auto inv = RandomInventory(rng);
        const AnnotatedQuery q = RandomQuery(rng, *inv);
        const Trajectory tau = RandomTrajectory(rng, *inv, 8);
        const RewardBreakdown paper =
            TrajectoryReward(*inv, q, tau, Reward(1.0, GainConvention::kPaper));
        if (paper.covered.empty()) return std::nullopt;
        const double id3 =
            TrajectoryReward(*inv, q, tau, Reward(1.0, GainConvention::kId3)).info_gain;
        const double h0 = paper.base_entropy;
        const double eps = 1e-12;
        if (paper.info_gain < -h0 - eps || paper.info_gain > eps ||
            id3 < -eps || id3 > h0 + eps) {
          return fmt::format("paper {} id3 {} h0 {}", paper.info_gain, id3, h0);
        }
        return std::nullopt;
      }));
  out.push_back(CheckProperty(
      "reward: matches the brute-force oracle", n, MixSeed(seed, 14),
      [](Rng& rng, size_t) -> Failure {
        auto inv = RandomInventory(rng);
        const AnnotatedQuery q = RandomQuery(rng, *inv);
        const Trajectory tau = RandomTrajectory(rng, *inv, 8);
        const double beta = 2.0 * UniformUnit(rng);
        for (GainConvention c : {GainConvention::kPaper, GainConvention::kId3}) {
          const double got = TrajectoryReward(*inv, q, tau, Reward(beta, c)).total;
          const double want = OracleReward(*inv, q, tau.labels(), beta, c).total;
          if (std::abs(got - want) > 1e-9) return fmt::format("{} vs {}", got, want);
        }
        return std::nullopt;
      }));
  out.push_back(CheckProperty(
      "reward: bitset evaluator agrees with trajectory reward", n,
      MixSeed(seed, 15), [](Rng& rng, size_t) -> Failure {
        auto inv = RandomInventory(rng);
        const AnnotatedQuery q = RandomQuery(rng, *inv);
        const Trajectory tau = RandomTrajectory(rng, *inv, 8);
        for (GainConvention c : {GainConvention::kPaper, GainConvention::kId3}) {
          const RewardConfig cfg = Reward(0.5 + UniformUnit(rng), c);
          const QueryEvaluator eval(*inv, q, cfg);
          const double a = eval.Reward(tau.labels());
          const double b = TrajectoryReward(*inv, q, tau, cfg).total;
          if (std::abs(a - b) > 1e-12) return fmt::format("{} vs {}", a, b);
        }
        return std::nullopt;
      }));
  return out;
}

SearchResult SmallSearch(Rng& rng, SearchInstance& inst, SearchConfig& cfg) {
  inst = RandomSearchInstance(rng, 1, 8);
  cfg.simulations = 10 + static_cast<int>(UniformIndex(rng, 60));
  cfg.trajectory_length = 1 + static_cast<int>(UniformIndex(rng, 4));
  cfg.seed = rng();
  const RewardConfig reward =
      Reward(UniformUnit(rng) * 2.0,
             UniformUnit(rng) < 0.5 ? GainConvention::kPaper : GainConvention::kId3);
  return RunSearch(*inst.inv, inst.query, Trajectory(), cfg, reward);
}

std::vector<PropertyResult> SearchProperties(size_t n, uint64_t seed) {
  std::vector<PropertyResult> out;
  out.push_back(CheckProperty(
      "search: N(root) = M and N(v) = sum of child visits", n, MixSeed(seed, 20),
      [](Rng& rng, size_t) -> Failure {
        SearchInstance inst{nullptr, AnnotatedQuery("q", {IntentId(0)})};
        SearchConfig cfg;
        const SearchResult r = SmallSearch(rng, inst, cfg);
        const SearchTree& tree = r.tree;
        if (tree.node(SearchTree::kRoot).visits != cfg.simulations ||
            r.policy.root_visits != cfg.simulations) {
          return fmt::format("root visits {} for M {}",
                             tree.node(SearchTree::kRoot).visits, cfg.simulations);
        }
        for (size_t i = 0; i < tree.size(); ++i) {
          const auto kids = tree.children(static_cast<int32_t>(i));
          if (kids.empty()) continue;
          int sum = 0;
          for (const SearchNode& c : kids) sum += c.visits;
          if (sum != tree.node(static_cast<int32_t>(i)).visits) {
            return fmt::format("node {} has {} visits, children {}", i,
                               tree.node(static_cast<int32_t>(i)).visits, sum);
          }
        }
        return std::nullopt;
      }));
  out.push_back(CheckProperty(
      "search: W/N lies within the observed reward range", n, MixSeed(seed, 21),
      [](Rng& rng, size_t) -> Failure {
        SearchInstance inst{nullptr, AnnotatedQuery("q", {IntentId(0)})};
        SearchConfig cfg;
        const SearchResult r = SmallSearch(rng, inst, cfg);
        for (size_t i = 0; i < r.tree.size(); ++i) {
          const SearchNode& v = r.tree.node(static_cast<int32_t>(i));
          if (v.visits == 0) continue;
          const double mean = v.total_reward / v.visits;
          if (mean < v.min_reward - 1e-12 || mean > v.max_reward + 1e-12) {
            return fmt::format("node {} mean {} outside [{}, {}]", i, mean,
                               v.min_reward, v.max_reward);
          }
        }
        return std::nullopt;
      }));
  out.push_back(CheckProperty(
      "search: zero temperature concentrates on the most visited", n,
      MixSeed(seed, 22), [](Rng& rng, size_t) -> Failure {
        std::vector<int32_t> visits(1 + UniformIndex(rng, 10));
        for (int32_t& v : visits) v = static_cast<int32_t>(UniformIndex(rng, 20));
        visits[UniformIndex(rng, visits.size())] += 1;
        const std::vector<double> pi = VisitPolicy(visits, 0.0);
        const int32_t top = *std::max_element(visits.begin(), visits.end());
        double sum = 0.0;
        for (size_t i = 0; i < pi.size(); ++i) {
          if (pi[i] > 0.0 && visits[i] != top) return "mass off the argmax";
          sum += pi[i];
        }
        if (std::abs(sum - 1.0) > 1e-12) return "not normalized";
        return std::nullopt;
      }));
  out.push_back(CheckProperty(
      "search: identical seeds give identical trees", n, MixSeed(seed, 23),
      [](Rng& rng, size_t) -> Failure {
        SearchInstance inst{nullptr, AnnotatedQuery("q", {IntentId(0)})};
        SearchConfig cfg;
        Rng copy = rng;
        const SearchResult a = SmallSearch(rng, inst, cfg);
        SearchInstance inst2{nullptr, AnnotatedQuery("q", {IntentId(0)})};
        SearchConfig cfg2;
        const SearchResult b = SmallSearch(copy, inst2, cfg2);
        if (a.tree.size() != b.tree.size()) return "tree sizes differ";
        for (size_t i = 0; i < a.tree.size(); ++i) {
          const SearchNode& x = a.tree.node(static_cast<int32_t>(i));
          const SearchNode& y = b.tree.node(static_cast<int32_t>(i));
          if (x.label != y.label || x.visits != y.visits ||
              x.total_reward != y.total_reward) {
            return fmt::format("node {} differs", i);
          }
        }
        if (a.policy.probs != b.policy.probs) return "policies differ";
        return std::nullopt;
      }));
  return out;
}

std::vector<uint8_t> RandomMask(Rng& rng, int num_labels,
                                const std::vector<LabelId>& history) {
  std::vector<uint8_t> allowed(num_labels, 0);
  for (int i = 0; i < num_labels; ++i) allowed[i] = UniformUnit(rng) < 0.6;
  std::vector<int> free;
  for (int i = 0; i < num_labels; ++i) {
    if (std::find(history.begin(), history.end(), LabelId(i)) == history.end()) {
      free.push_back(i);
    }
  }
  allowed[free[UniformIndex(rng, free.size())]] = 1;
  return allowed;
}

std::vector<LabelId> RandomHistory(Rng& rng, int num_labels, size_t max_len) {
  std::vector<LabelId> all;
  for (int i = 0; i < num_labels; ++i) all.push_back(LabelId(i));
  Shuffle(all, rng);
  all.resize(std::min<size_t>(UniformIndex(rng, max_len + 1),
                              static_cast<size_t>(num_labels - 1)));
  return all;
}

std::vector<PropertyResult> PolicyProperties(size_t n, uint64_t seed) {
  std::vector<PropertyResult> out;
  const Vocabulary vocab = ToyVocab();
  out.push_back(CheckProperty(
      "policy: forward is a distribution with exact zeros on masked labels", n,
      MixSeed(seed, 30), [&](Rng& rng, size_t i) -> Failure {
        const int labels = 2 + static_cast<int>(UniformIndex(rng, 8));
        PolicyModel model(ToyConfig(i % 2 ? EncoderKind::kAttention : EncoderKind::kMlp,
                                    rng()),
                          vocab, labels);
        const std::vector<LabelId> history = RandomHistory(rng, labels, 6);
        const std::vector<uint8_t> allowed = RandomMask(rng, labels, history);
        const Eigen::VectorXd p =
            model.Forward(vocab.Encode("apply for a card"), history, allowed);
        double sum = 0.0;
        for (int k = 0; k < labels; ++k) {
          const bool in_history =
              std::find(history.begin(), history.end(), LabelId(k)) != history.end();
          if ((!allowed[k] || in_history) && p[k] != 0.0) return "masked mass";
          if (!(p[k] >= 0.0)) return "negative or NaN";
          sum += p[k];
        }
        if (std::abs(sum - 1.0) > 1e-12) return fmt::format("sum {}", sum);
        return std::nullopt;
      }));
  out.push_back(CheckProperty(
      "policy: relabeling labels permutes the outputs", n, MixSeed(seed, 31),
      [&](Rng& rng, size_t i) -> Failure {
        const int labels = 2 + static_cast<int>(UniformIndex(rng, 8));
        PolicyModel a(ToyConfig(i % 2 ? EncoderKind::kAttention : EncoderKind::kMlp,
                                rng()),
                      vocab, labels);
        std::vector<int> perm(labels);
        std::iota(perm.begin(), perm.end(), 0);
        Shuffle(perm, rng);
        PolicyModel b = a;
        for (ParamBlock& blk : b.blocks()) {
          const ParamBlock* src = nullptr;
          for (const ParamBlock& s : a.blocks()) {
            if (s.name == blk.name) src = &s;
          }
          if (blk.name == "decoder.label_embedding") {
            for (int k = 0; k < labels; ++k) blk.value.col(perm[k]) = src->value.col(k);
          } else if (blk.name == "head.w" || blk.name == "head.b") {
            for (int k = 0; k < labels; ++k) blk.value.row(perm[k]) = src->value.row(k);
          }
        }
        const std::vector<LabelId> history = RandomHistory(rng, labels, 5);
        std::vector<LabelId> mapped;
        for (LabelId x : history) mapped.push_back(LabelId(perm[x.value()]));
        const std::vector<int> tokens = vocab.Encode("cancel my credit card");
        const Eigen::VectorXd za = a.Logits(tokens, history);
        const Eigen::VectorXd zb = b.Logits(tokens, mapped);
        for (int k = 0; k < labels; ++k) {
          if (std::abs(za[k] - zb[perm[k]]) > 1e-12) {
            return fmt::format("label {}: {} vs {}", k, za[k], zb[perm[k]]);
          }
        }
        return std::nullopt;
      }));
  out.push_back(CheckProperty(
      "policy: exhaustive supervised targets reach the enumerated optimum", n,
      MixSeed(seed, 32), [](Rng& rng, size_t) -> Failure {
        const SearchInstance inst = RandomSearchInstance(rng, 1, 6);
        const int len = 1 + static_cast<int>(UniformIndex(rng, 3));
        const GainConvention c =
            UniformUnit(rng) < 0.5 ? GainConvention::kPaper : GainConvention::kId3;
        const SupervisedTarget t =
            SupervisedTargets(*inst.inv, inst.query, len, Reward(1.0, c), 1000000, rng());
        if (!t.exhaustive) return "exhaustive branch did not run";
        const OracleBest best = OracleBestTrajectory(*inst.inv, inst.query, len, 1.0, c);
        if (std::abs(t.reward - best.reward) > 1e-9) {
          return fmt::format("{} vs optimum {}", t.reward, best.reward);
        }
        const double check = OracleReward(*inst.inv, inst.query,
                                          t.trajectory.labels(), 1.0, c).total;
        if (std::abs(check - t.reward) > 1e-9) return "reported reward is wrong";
        return std::nullopt;
      }));
  out.push_back(CheckProperty(
      "policy: training is deterministic given seeds", n, MixSeed(seed, 33),
      [&](Rng& rng, size_t) -> Failure {
        const int labels = 3 + static_cast<int>(UniformIndex(rng, 5));
        const uint64_t model_seed = rng();
        std::vector<PolicySample> samples;
        for (int k = 0; k < 6; ++k) {
          PolicySample s;
          s.tokens = vocab.Encode(k % 2 ? "apply for a loan" : "qr code fee");
          s.history = RandomHistory(rng, labels, 2);
          s.allowed = RandomMask(rng, labels, s.history);
          for (LabelId x : s.history) s.allowed[x.index()] = 0;
          s.target = RandomTarget(rng, s.allowed);
          samples.push_back(std::move(s));
        }
        TrainConfig cfg;
        cfg.batch_size = 4;
        cfg.passes = 2;
        cfg.direction = UniformUnit(rng) < 0.5 ? KlDirection::kModelToTarget
                                               : KlDirection::kTargetToModel;
        const uint64_t fit_seed = rng();
        auto run = [&]() {
          ModelConfig mc = ToyConfig(EncoderKind::kMlp, model_seed);
          mc.zero_output_init = true;
          PolicyModel model(mc, vocab, labels);
          SgdMomentum opt(cfg.learning_rate, cfg.momentum, cfg.clip_norm);
          std::vector<PolicySample> copy = samples;
          Rng r = MakeRng(fit_seed);
          FitPolicy(model, opt, copy, cfg, r);
          return model;
        };
        const PolicyModel a = run();
        const PolicyModel b = run();
        for (size_t k = 0; k < a.blocks().size(); ++k) {
          if (a.blocks()[k].value != b.blocks()[k].value) {
            return "block " + a.blocks()[k].name + " differs";
          }
        }
        return std::nullopt;
      }));
  return out;
}

std::vector<PropertyResult> EvalProperties(size_t n, uint64_t seed) {
  std::vector<PropertyResult> out;
  out.push_back(CheckProperty(
      "eval: union recall is monotone in prefix length", n, MixSeed(seed, 40),
      [](Rng& rng, size_t) -> Failure {
        auto inv = RandomInventory(rng);
        const AnnotatedQuery q = RandomQuery(rng, *inv);
        const Trajectory tau = RandomTrajectory(rng, *inv, 8);
        double prev = 0.0;
        for (size_t k = 0; k <= tau.size(); ++k) {
          const double r = RecallAtN(*inv, q, tau.Prefix(k), RecallVariant::kUnion);
          if (r < prev - 1e-15) return fmt::format("drops at prefix {}", k);
          prev = r;
        }
        return std::nullopt;
      }));
  out.push_back(CheckProperty(
      "eval: sum recall equals union recall for disjoint covers", n,
      MixSeed(seed, 41), [](Rng& rng, size_t) -> Failure {
        auto inv = RandomInventory(rng);
        const AnnotatedQuery q = RandomQuery(rng, *inv);
        const Trajectory raw = RandomTrajectory(rng, *inv, 8);
        Trajectory tau;
        IntentSet seen;
        for (LabelId x : raw.labels()) {
          const IntentSet c = Intersect(inv->IntentsOf(x), q.potential_intents());
          if (Intersects(seen, c)) continue;
          seen = Union(seen, c);
          tau.Append(x);
        }
        const double u = RecallAtN(*inv, q, tau, RecallVariant::kUnion);
        const double s = RecallAtN(*inv, q, tau, RecallVariant::kSum);
        if (std::abs(u - s) > 1e-12) return fmt::format("{} vs {}", u, s);
        return std::nullopt;
      }));
  out.push_back(CheckProperty(
      "eval: upper bound dominates recall and matches enumeration", n,
      MixSeed(seed, 42), [](Rng& rng, size_t) -> Failure {
        RandomInventoryOptions opts;
        opts.max_labels = 10;
        auto inv = RandomInventory(rng, opts);
        const AnnotatedQuery q = RandomQuery(rng, *inv);
        const int k = 1 + static_cast<int>(UniformIndex(rng, 4));
        const UpperBound ub = UpperBoundAtN(*inv, q, k);
        if (!ub.exact) return "expected the exact bound";
        if (ub.ratio > 1.0 + 1e-15 || ub.ratio < 0.0) return "ratio out of range";
        if (ub.covered != OracleMaxCoverage(*inv, q, k)) {
          return fmt::format("covered {} vs enumerated {}", ub.covered,
                             OracleMaxCoverage(*inv, q, k));
        }
        const Trajectory tau = RandomTrajectory(rng, *inv, k);
        if (RecallAtN(*inv, q, tau, RecallVariant::kUnion) > ub.ratio + 1e-12) {
          return "recall above the bound";
        }
        return std::nullopt;
      }));
  out.push_back(CheckProperty(
      "eval: diversity is 1 iff no token repeats", n, MixSeed(seed, 43),
      [](Rng& rng, size_t) -> Failure {
        auto inv = RandomInventory(rng);
        Trajectory tau = RandomTrajectory(rng, *inv, 6);
        if (tau.empty()) tau.Append(LabelId(0));
        std::vector<std::string> tokens;
        for (LabelId x : tau.labels()) {
          for (auto& t : Tokenize(inv->label(x).phrase, TokenizerScheme::kWhitespace)) {
            tokens.push_back(t);
          }
        }
        const bool repeats =
            std::set<std::string>(tokens.begin(), tokens.end()).size() != tokens.size();
        const double d = Diversity(tau, *inv, TokenizerScheme::kWhitespace);
        if ((d == 1.0) == repeats) return fmt::format("diversity {}", d);
        if (d <= 0.0 || d > 1.0) return "diversity out of range";
        return std::nullopt;
      }));
  out.push_back(CheckProperty(
      "eval: overlap does not depend on label order", n, MixSeed(seed, 44),
      [](Rng& rng, size_t) -> Failure {
        auto inv = RandomInventory(rng);
        Trajectory tau = RandomTrajectory(rng, *inv, 6);
        if (tau.empty()) tau.Append(LabelId(0));
        const AnnotatedQuery q = RandomQuery(rng, *inv);
        std::vector<LabelId> perm = tau.labels();
        Shuffle(perm, rng);
        const double a = Overlap(tau, q.text(), *inv, TokenizerScheme::kWhitespace);
        const double b =
            Overlap(Trajectory(perm), q.text(), *inv, TokenizerScheme::kWhitespace);
        if (std::abs(a - b) > 1e-12) return fmt::format("{} vs {}", a, b);
        if (a < 0.0 || a > 1.0) return "overlap out of range";
        return std::nullopt;
      }));
  out.push_back(CheckProperty(
      "eval: simulation is deterministic under its seed", n, MixSeed(seed, 45),
      [](Rng& rng, size_t) -> Failure {
        const Corpus corpus = RandomCorpus(rng, 6);
        const Bm25Index index(corpus.inventory);
        const RandomRecommender rec("random",
                                    static_cast<int>(corpus.inventory->num_labels()),
                                    rng());
        const ClickModel model =
            ClickModel::Parse(UniformUnit(rng) < 0.5 ? "oracle" : "noisy", 0.9);
        const uint64_t s = rng();
        const SimReport a = SimulateOnline(corpus, index, {&rec}, model, 20, s);
        const SimReport b = SimulateOnline(corpus, index, {&rec}, model, 20, s);
        if (a.ToJson() != b.ToJson()) return "reports differ";
        for (const SimRow& row : a.rows) {
          const SimCounters& k = row.counters;
          if (k.c > k.t || k.m > k.n || k.ctr() < 0 || k.ctr() > 1 ||
              k.tha() < 0 || k.tha() > 1) {
            return "counter bounds violated";
          }
        }
        return std::nullopt;
      }));
  return out;
}

// Legal transcripts are prefixes of U L (S|N) I (R|T).
bool OracleLegal(const std::vector<EventType>& events) {
  const std::vector<std::vector<EventType>> slots = {
      {EventType::kUserMessage},
      {EventType::kLabelsShown},
      {EventType::kLabelSelected, EventType::kNoneSelected},
      {EventType::kIntentsShown},
      {EventType::kIntentSelected, EventType::kTransferred}};
  if (events.empty() || events.size() > slots.size()) return false;
  for (size_t i = 0; i < events.size(); ++i) {
    if (std::find(slots[i].begin(), slots[i].end(), events[i]) == slots[i].end()) {
      return false;
    }
  }
  return true;
}

std::vector<PropertyResult> ServiceProperties(size_t n, uint64_t seed) {
  std::vector<PropertyResult> out;
  out.push_back(CheckProperty(
      "service: retrieval matches the BM25 oracle and is pure", n,
      MixSeed(seed, 50), [](Rng& rng, size_t) -> Failure {
        auto inv = RandomInventory(rng);
        const AnnotatedQuery q = RandomQuery(rng, *inv);
        const Bm25Index index(inv);
        const RetrievalResult r = index.Retrieve(q.text(), inv->num_intents());
        if (r.intents.size() != inv->num_intents()) return "wrong result size";
        std::vector<std::string> docs;
        for (const Intent& s : inv->intents()) docs.push_back(s.text);
        for (size_t k = 0; k < r.intents.size(); ++k) {
          const ScoredIntent& s = r.intents[k];
          const double want = OracleBm25(docs, s.id.index(), q.text(), 1.2, 0.75);
          if (std::abs(s.score - want) > 1e-9) {
            return fmt::format("intent {}: {} vs {}", s.id.value(), s.score, want);
          }
          if (k > 0) {
            const ScoredIntent& p = r.intents[k - 1];
            if (p.score < s.score || (p.score == s.score && p.id > s.id)) {
              return "order violated at rank " + std::to_string(k);
            }
          }
        }
        const size_t k = UniformIndex(rng, inv->num_intents() + 2);
        const RetrievalResult again = Bm25Index(inv).Retrieve(q.text(), k);
        if (again.intents.size() != std::min(k, inv->num_intents())) return "size";
        for (size_t j = 0; j < again.intents.size(); ++j) {
          if (again.intents[j].id != r.intents[j].id) return "not pure";
        }
        return std::nullopt;
      }));
  out.push_back(CheckProperty(
      "service: transcripts validate exactly when the state machine allows", n,
      MixSeed(seed, 51), [](Rng& rng, size_t) -> Failure {
        std::vector<EventType> types;
        std::vector<SessionEvent> events;
        const size_t len = 1 + UniformIndex(rng, 6);
        // Mostly legal walks with random corruptions.
        const std::vector<EventType> legal = {
            EventType::kUserMessage, EventType::kLabelsShown,
            UniformUnit(rng) < 0.5 ? EventType::kLabelSelected : EventType::kNoneSelected,
            EventType::kIntentsShown,
            UniformUnit(rng) < 0.5 ? EventType::kIntentSelected : EventType::kTransferred};
        for (size_t i = 0; i < len; ++i) {
          EventType t = i < legal.size() ? legal[i] : EventType::kTransferred;
          if (UniformUnit(rng) < 0.2) t = static_cast<EventType>(UniformIndex(rng, 7));
          types.push_back(t);
          events.push_back({t, nlohmann::json::object()});
        }
        const bool ok = ValidateTranscript(events).empty();
        if (ok != OracleLegal(types)) return ok ? "accepted illegal" : "rejected legal";
        return std::nullopt;
      }));
  out.push_back(CheckProperty(
      "service: log replay reconstructs the counters", n, MixSeed(seed, 52),
      [](Rng& rng, size_t i) -> Failure {
        const auto dir = std::filesystem::temp_directory_path() /
                         fmt::format("clarify_replay_{}_{}", ::getpid(), i);
        std::filesystem::remove_all(dir);
        auto inv = RandomInventory(rng);
        auto rec = std::make_shared<RandomRecommender>(
            "random", static_cast<int>(inv->num_labels()), rng());
        ServiceConfig cfg;
        cfg.log_dir = dir;
        SimCounters live;
        {
          ClarificationService service(inv, rec, cfg);
          const size_t sessions = 1 + UniformIndex(rng, 5);
          for (size_t s = 0; s < sessions; ++s) {
            const StartResult st = service.StartSession(RandomQuery(rng, *inv).text());
            if (UniformUnit(rng) < 0.2) continue;
            std::optional<LabelId> choice;
            if (UniformUnit(rng) < 0.7) {
              choice = st.labels[UniformIndex(rng, st.labels.size())];
            }
            const auto intents = service.SelectLabel(st.session_id, choice);
            if (UniformUnit(rng) < 0.2) continue;
            std::optional<IntentId> pick;
            if (UniformUnit(rng) < 0.5) pick = intents[UniformIndex(rng, intents.size())];
            service.Resolve(st.session_id, pick);
          }
          live = service.Metrics();
        }
        const ReplayResult replay = ReplayEventLog(dir);
        // A restarted service picks up where the log ends.
        ClarificationService restarted(inv, rec, cfg);
        const SimCounters again = restarted.Metrics();
        std::filesystem::remove_all(dir);
        if (!replay.invalid.empty()) return "invalid transcript in log";
        const SimCounters& k = replay.counters;
        if (k.t != live.t || k.c != live.c || k.n != live.n || k.m != live.m) {
          return "replayed counters differ";
        }
        if (again.t != live.t || again.m != live.m) return "restart lost counters";
        return std::nullopt;
      }));
  return out;
}

}  // namespace

std::vector<PropertyResult> RunPropertySuite(size_t cases, uint64_t seed) {
  std::vector<PropertyResult> out;
  for (auto part : {InventoryProperties, RewardProperties, SearchProperties,
                    PolicyProperties, EvalProperties, ServiceProperties}) {
    for (PropertyResult& r : part(cases, seed)) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace clarify::testing
