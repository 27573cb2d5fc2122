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

#ifndef CLARIFY_SEARCH_SEARCH_H_
#define CLARIFY_SEARCH_SEARCH_H_

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "clarify/common/random.h"
#include "clarify/inventory/inventory.h"
#include "clarify/reward/evaluator.h"
#include "clarify/reward/reward.h"
#include "json.hpp"

namespace clarify {

struct SearchConfig {
  int simulations = 1000;       // M, per move
  int trajectory_length = 6;    // N
  double exploration = 1.0;     // beta_T
  double temperature = 1.0;     // T
  double dirichlet_alpha = 0.03;
  double noise_weight = 0.25;
  uint64_t seed = 0;

  // Throws ConfigError.
  void Validate() const;
  nlohmann::json ToJson() const;
  static SearchConfig FromJson(const nlohmann::json& j);
};

// One node of the search arena. Children of a node are contiguous.
struct SearchNode {
  LabelId label;             // unset at the root
  int32_t parent = -1;
  int32_t first_child = -1;
  int32_t num_children = 0;
  bool expanded = false;
  int32_t visits = 0;        // N(v)
  double total_reward = 0;   // W(v): sum of rewards of trajectories through v
  // Extremes of the rewards backed up through this node.
  double min_reward = std::numeric_limits<double>::infinity();
  double max_reward = -std::numeric_limits<double>::infinity();
};

class SearchTree {
 public:
  static constexpr int32_t kRoot = 0;

  const SearchNode& node(int32_t i) const { return nodes_[i]; }
  std::span<const SearchNode> children(int32_t i) const;
  int32_t ChildIndex(int32_t parent, int32_t k) const {
    return nodes_[parent].first_child + k;
  }
  size_t size() const { return nodes_.size(); }

 private:
  friend class TreeSearcher;
  std::vector<SearchNode> nodes_;
};

// W/N plus the exploration bonus beta_T * sqrt(2 ln N(parent) / N).
// Returns +infinity for unvisited nodes.
double UcbValue(const SearchNode& node, int parent_visits, double beta_t);

// Visit-count distribution at the root plus the best trajectory seen.
struct SearchPolicy {
  std::vector<LabelId> actions;  // root children, in expansion order
  std::vector<double> probs;     // pi(a | root), parallel to actions
  std::vector<int32_t> visits;   // N(a), parallel to actions
  Trajectory best_trajectory;
  double best_reward = -std::numeric_limits<double>::infinity();
  int root_visits = 0;

  double ProbOf(LabelId x) const;
};

struct SearchResult {
  SearchPolicy policy;
  SearchTree tree;
};

// Runs cfg.simulations UCT simulations from the prefix state over the pruned
// action space. Throws NoCandidatesError when no candidate label remains and
// PreconditionError when the prefix already has N labels.
SearchResult RunSearch(const QueryEvaluator& evaluator,
                       const Trajectory& prefix, const SearchConfig& cfg,
                       Rng& rng);

// Convenience overload; seeds the tree's random stream from cfg.seed.
SearchResult RunSearch(const Inventory& inv, const AnnotatedQuery& query,
                       const Trajectory& prefix, const SearchConfig& cfg,
                       const RewardConfig& reward_cfg);

// Visit counts to probabilities with temperature T (argmax as T -> 0).
std::vector<double> VisitPolicy(std::span<const int32_t> visits,
                                double temperature);

// (1 - weight) * pi + weight * noise, elementwise.
std::vector<double> MixNoise(std::span<const double> pi,
                             std::span<const double> noise, double weight);

enum class SampleMode { kTraining, kInference };

// Training: samples from pi mixed with Dirichlet noise over the root
// children. Inference: argmax pi, ties to the smallest label id. When
// `mixed` is non-null it receives the sampling distribution.
LabelId SampleAction(const SearchPolicy& policy, const SearchConfig& cfg,
                     SampleMode mode, Rng& rng,
                     std::vector<double>* mixed = nullptr);

// One supervision target: the search distribution at state (query, prefix).
// `actions` is the pruned action space at that state.
struct TrainingPair {
  std::string query;
  Trajectory prefix;
  std::vector<LabelId> actions;
  std::vector<double> pi;

  nlohmann::json ToJson() const;
  static TrainingPair FromJson(const nlohmann::json& j);
};

struct Episode {
  std::vector<TrainingPair> pairs;
  Trajectory trajectory;
  double reward = 0.0;
};

// Fresh search at every prefix, t = 0..N-1; stops early only when the pruned
// action space is exhausted. Throws NoCandidatesError if the query has no
// candidate labels at all.
Episode SelfPlayEpisode(const QueryEvaluator& evaluator,
                        const std::string& query_text, const SearchConfig& cfg,
                        Rng& rng);

Episode SelfPlayEpisode(const Inventory& inv, const AnnotatedQuery& query,
                        const SearchConfig& cfg, const RewardConfig& reward_cfg,
                        Rng& rng);

}  // namespace clarify

#endif  // CLARIFY_SEARCH_SEARCH_H_
