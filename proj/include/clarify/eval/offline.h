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

#ifndef CLARIFY_EVAL_OFFLINE_H_
#define CLARIFY_EVAL_OFFLINE_H_

#include <string>
#include <vector>

#include "clarify/inventory/inventory.h"
#include "clarify/inventory/tokenizer.h"
#include "clarify/policy/recommender.h"
#include "json.hpp"

namespace clarify {

struct OfflineEvalConfig {
  std::vector<int> n_values = {3, 6};
  // Trajectory length for diversity and overlap.
  int complementarity_n = 6;
  TokenizerScheme scheme = TokenizerScheme::kWhitespace;
  int threads = 1;
};

struct MethodScores {
  std::string name;
  // Indexed like OfflineEvalConfig::n_values.
  std::vector<double> union_recall;
  std::vector<double> sum_recall;
  double diversity = 0.0;
  double overlap = 0.0;
};

struct QueryRow {
  std::string text;
  size_t num_potential = 0;
  size_t num_candidates = 0;
  std::vector<double> upper_bound;
  std::vector<bool> upper_bound_exact;
  // [method][n index], union variant.
  std::vector<std::vector<double>> union_recall;
  // [method], recommended labels at complementarity_n.
  std::vector<std::vector<int32_t>> labels;
};

struct OfflineReport {
  uint64_t corpus_seed = 0;
  uint64_t inventory_hash = 0;
  std::vector<int> n_values;
  std::string tokenizer;
  std::vector<double> upper_bound;
  // Queries where the bound fell back to greedy max-coverage.
  size_t inexact_upper_bounds = 0;
  std::vector<MethodScores> methods;
  std::vector<QueryRow> queries;

  const MethodScores& Method(const std::string& name) const;

  nlohmann::json ToJson() const;
  // Aligned plain-text tables: recall and complementarity.
  std::string ToText() const;
};

// Scores every recommender on the test split. Read-only; queries run in
// parallel and rows are reduced in query order, so the report does not
// depend on the thread count.
OfflineReport RunOfflineEval(const Corpus& corpus,
                             const std::vector<const Recommender*>& methods,
                             const OfflineEvalConfig& cfg = {});

}  // namespace clarify

#endif  // CLARIFY_EVAL_OFFLINE_H_
