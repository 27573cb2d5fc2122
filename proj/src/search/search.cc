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

#include "clarify/search/search.h"

#include <algorithm>
#include <cmath>

#include "clarify/common/errors.h"

namespace clarify {

using nlohmann::json;

void SearchConfig::Validate() const {
  if (simulations < 1) throw ConfigError("simulations must be >= 1");
  if (trajectory_length < 1) throw ConfigError("trajectory length must be >= 1");
  if (!(temperature > 0.0)) throw ConfigError("temperature must be > 0");
  if (!(noise_weight >= 0.0 && noise_weight <= 1.0)) {
    throw ConfigError("noise weight must lie in [0, 1]");
  }
  if (!(dirichlet_alpha > 0.0)) throw ConfigError("dirichlet alpha must be > 0");
  if (!(exploration >= 0.0)) throw ConfigError("exploration must be >= 0");
}

json SearchConfig::ToJson() const {
  return {{"simulations", simulations},
          {"trajectory_length", trajectory_length},
          {"exploration", exploration},
          {"temperature", temperature},
          {"dirichlet_alpha", dirichlet_alpha},
          {"noise_weight", noise_weight},
          {"seed", seed}};
}

SearchConfig SearchConfig::FromJson(const json& j) {
  SearchConfig c;
  c.simulations = j.value("simulations", c.simulations);
  c.trajectory_length = j.value("trajectory_length", c.trajectory_length);
  c.exploration = j.value("exploration", c.exploration);
  c.temperature = j.value("temperature", c.temperature);
  c.dirichlet_alpha = j.value("dirichlet_alpha", c.dirichlet_alpha);
  c.noise_weight = j.value("noise_weight", c.noise_weight);
  c.seed = j.value("seed", c.seed);
  c.Validate();
  return c;
}

std::span<const SearchNode> SearchTree::children(int32_t i) const {
  const SearchNode& n = nodes_[i];
  if (n.num_children == 0) return {};
  return std::span<const SearchNode>(nodes_.data() + n.first_child,
                                     static_cast<size_t>(n.num_children));
}

double UcbValue(const SearchNode& node, int parent_visits, double beta_t) {
  if (node.visits == 0) return std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(node.visits);
  return node.total_reward / n +
         beta_t * std::sqrt(2.0 * std::log(static_cast<double>(parent_visits)) / n);
}

double SearchPolicy::ProbOf(LabelId x) const {
  for (size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] == x) return probs[i];
  }
  return 0.0;
}

std::vector<double> VisitPolicy(std::span<const int32_t> visits,
                                double temperature) {
  std::vector<double> out(visits.size(), 0.0);
  const int32_t max_visits =
      visits.empty() ? 0 : *std::max_element(visits.begin(), visits.end());
  if (max_visits <= 0) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
    return out;
  }
  // N^(1/T) normalised, computed relative to the max to stay finite.
  const double log_max = std::log(static_cast<double>(max_visits));
  double total = 0.0;
  for (size_t i = 0; i < visits.size(); ++i) {
    if (visits[i] <= 0) continue;
    out[i] = std::exp((std::log(static_cast<double>(visits[i])) - log_max) /
                      temperature);
    total += out[i];
  }
  for (double& p : out) p /= total;
  return out;
}

std::vector<double> MixNoise(std::span<const double> pi,
                             std::span<const double> noise, double weight) {
  std::vector<double> out(pi.size());
  for (size_t i = 0; i < pi.size(); ++i) {
    out[i] = (1.0 - weight) * pi[i] + weight * noise[i];
  }
  return out;
}

class TreeSearcher {
 public:
  TreeSearcher(const QueryEvaluator& evaluator, const Trajectory& prefix,
               const SearchConfig& cfg, Rng& rng)
      : evaluator_(evaluator), prefix_(prefix), cfg_(cfg), rng_(rng) {
    for (LabelId x : evaluator.candidates()) {
      if (!prefix.Contains(x)) base_actions_.push_back(x);
    }
  }

  SearchResult Run() {
    cfg_.Validate();
    const int depth_limit =
        cfg_.trajectory_length - static_cast<int>(prefix_.size());
    if (depth_limit < 1) {
      throw PreconditionError("prefix already holds the full trajectory");
    }
    if (base_actions_.empty()) {
      throw NoCandidatesError("no candidate label left to search");
    }
    SearchResult result;
    auto& nodes = result.tree.nodes_;
    nodes.reserve(static_cast<size_t>(cfg_.simulations) * 4);
    nodes.emplace_back();

    std::vector<LabelId> trajectory(prefix_.labels());
    std::vector<int32_t> path;
    SearchPolicy& policy = result.policy;
    for (int sim = 0; sim < cfg_.simulations; ++sim) {
      trajectory.resize(prefix_.size());
      path.assign(1, SearchTree::kRoot);
      int32_t current = SearchTree::kRoot;
      for (int depth = 0; depth < depth_limit; ++depth) {
        if (!nodes[current].expanded) Expand(nodes, current, trajectory);
        const SearchNode& node = nodes[current];
        if (node.num_children == 0) break;
        current = SelectChild(nodes, current);
        trajectory.push_back(nodes[current].label);
        path.push_back(current);
      }
      const double reward = evaluator_.Reward(trajectory);
      for (int32_t i : path) {
        SearchNode& n = nodes[i];
        ++n.visits;
        n.total_reward += reward;
        n.min_reward = std::min(n.min_reward, reward);
        n.max_reward = std::max(n.max_reward, reward);
      }
      if (reward > policy.best_reward) {
        policy.best_reward = reward;
        policy.best_trajectory = Trajectory(trajectory);
      }
    }

    const SearchNode& root = nodes[SearchTree::kRoot];
    policy.root_visits = root.visits;
    for (const SearchNode& child : result.tree.children(SearchTree::kRoot)) {
      policy.actions.push_back(child.label);
      policy.visits.push_back(child.visits);
    }
    policy.probs = VisitPolicy(policy.visits, cfg_.temperature);
    return result;
  }

 private:
  // Creates one child per remaining action, in a seeded random order.
  void Expand(std::vector<SearchNode>& nodes, int32_t index,
              const std::vector<LabelId>& trajectory) {
    scratch_.clear();
    for (LabelId x : base_actions_) {
      if (std::find(trajectory.begin() + prefix_.size(), trajectory.end(), x) ==
          trajectory.end()) {
        scratch_.push_back(x);
      }
    }
    Shuffle(scratch_, rng_);
    const auto first = static_cast<int32_t>(nodes.size());
    for (LabelId x : scratch_) {
      SearchNode child;
      child.label = x;
      child.parent = index;
      nodes.push_back(child);
    }
    SearchNode& node = nodes[index];
    node.expanded = true;
    node.first_child = scratch_.empty() ? -1 : first;
    node.num_children = static_cast<int32_t>(scratch_.size());
  }

  // Unvisited children first, in stored order; otherwise max UCB with ties
  // going to the earlier child.
  int32_t SelectChild(const std::vector<SearchNode>& nodes, int32_t index) {
    const SearchNode& node = nodes[index];
    const int32_t begin = node.first_child;
    const int32_t end = begin + node.num_children;
    for (int32_t i = begin; i < end; ++i) {
      if (nodes[i].visits == 0) return i;
    }
    const double bonus =
        cfg_.exploration *
        std::sqrt(2.0 * std::log(static_cast<double>(node.visits)));
    int32_t best = begin;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int32_t i = begin; i < end; ++i) {
      const double n = static_cast<double>(nodes[i].visits);
      const double value = nodes[i].total_reward / n + bonus / std::sqrt(n);
      if (value > best_value) {
        best_value = value;
        best = i;
      }
    }
    return best;
  }

  const QueryEvaluator& evaluator_;
  const Trajectory& prefix_;
  const SearchConfig& cfg_;
  Rng& rng_;
  std::vector<LabelId> base_actions_;
  std::vector<LabelId> scratch_;
};

SearchResult RunSearch(const QueryEvaluator& evaluator,
                       const Trajectory& prefix, const SearchConfig& cfg,
                       Rng& rng) {
  return TreeSearcher(evaluator, prefix, cfg, rng).Run();
}

SearchResult RunSearch(const Inventory& inv, const AnnotatedQuery& query,
                       const Trajectory& prefix, const SearchConfig& cfg,
                       const RewardConfig& reward_cfg) {
  QueryEvaluator evaluator(inv, query, reward_cfg);
  Rng rng = MakeRng(cfg.seed);
  return RunSearch(evaluator, prefix, cfg, rng);
}

LabelId SampleAction(const SearchPolicy& policy, const SearchConfig& cfg,
                     SampleMode mode, Rng& rng, std::vector<double>* mixed) {
  if (policy.actions.empty()) {
    throw PreconditionError("cannot sample from an empty policy");
  }
  if (mode == SampleMode::kInference) {
    size_t best = 0;
    for (size_t i = 1; i < policy.actions.size(); ++i) {
      if (policy.probs[i] > policy.probs[best] ||
          (policy.probs[i] == policy.probs[best] &&
           policy.actions[i] < policy.actions[best])) {
        best = i;
      }
    }
    if (mixed != nullptr) *mixed = policy.probs;
    return policy.actions[best];
  }
  const auto noise =
      SampleDirichlet(rng, policy.actions.size(), cfg.dirichlet_alpha);
  auto dist = MixNoise(policy.probs, noise, cfg.noise_weight);
  const LabelId pick = policy.actions[SampleWeighted(rng, dist)];
  if (mixed != nullptr) *mixed = std::move(dist);
  return pick;
}

json TrainingPair::ToJson() const {
  json prefix_ids = json::array();
  for (LabelId x : prefix.labels()) prefix_ids.push_back(x.value());
  json dist = json::object();
  for (size_t i = 0; i < actions.size(); ++i) {
    dist[std::to_string(actions[i].value())] = pi[i];
  }
  return {{"query", query}, {"prefix", prefix_ids}, {"pi", dist}};
}

TrainingPair TrainingPair::FromJson(const json& j) {
  TrainingPair pair;
  try {
    pair.query = j.at("query").get<std::string>();
    std::vector<LabelId> prefix;
    for (const json& x : j.at("prefix")) prefix.emplace_back(x.get<int32_t>());
    pair.prefix = Trajectory(std::move(prefix));
    std::vector<std::pair<LabelId, double>> entries;
    for (const auto& [key, value] : j.at("pi").items()) {
      entries.push_back({LabelId(std::stoi(key)), value.get<double>()});
    }
    std::sort(entries.begin(), entries.end());
    for (const auto& [x, p] : entries) {
      pair.actions.push_back(x);
      pair.pi.push_back(p);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("training pair: ") + e.what());
  } catch (const std::logic_error& e) {
    throw ParseError(std::string("training pair: ") + e.what());
  }
  return pair;
}

Episode SelfPlayEpisode(const QueryEvaluator& evaluator,
                        const std::string& query_text, const SearchConfig& cfg,
                        Rng& rng) {
  cfg.Validate();
  if (evaluator.candidates().empty()) {
    throw NoCandidatesError("query '" + query_text +
                            "' has no candidate label");
  }
  Episode episode;
  for (int t = 0; t < cfg.trajectory_length; ++t) {
    if (episode.trajectory.size() >= evaluator.candidates().size()) break;
    Rng tree_rng(rng());
    SearchResult result =
        RunSearch(evaluator, episode.trajectory, cfg, tree_rng);
    TrainingPair pair;
    pair.query = query_text;
    pair.prefix = episode.trajectory;
    pair.actions = result.policy.actions;
    pair.pi = result.policy.probs;
    episode.pairs.push_back(std::move(pair));
    episode.trajectory.Append(
        SampleAction(result.policy, cfg, SampleMode::kTraining, rng));
  }
  episode.reward = evaluator.Reward(episode.trajectory.labels());
  return episode;
}

Episode SelfPlayEpisode(const Inventory& inv, const AnnotatedQuery& query,
                        const SearchConfig& cfg, const RewardConfig& reward_cfg,
                        Rng& rng) {
  QueryEvaluator evaluator(inv, query, reward_cfg);
  return SelfPlayEpisode(evaluator, query.text(), cfg, rng);
}

}  // namespace clarify
