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

#ifndef CLARIFY_INVENTORY_GENERATOR_H_
#define CLARIFY_INVENTORY_GENERATOR_H_

#include <cstdint>
#include <string>
#include <vector>

#include "clarify/inventory/inventory.h"
#include "json.hpp"

namespace clarify {

// Shape of the synthetic benchmark. Intents are (action, product) pairs,
// labels are phrases for attribute values, and each attribute value owns a
// synonym group of phrases that split its intents between them.
struct GeneratorConfig {
  int num_intents = 200;
  int num_labels = 80;
  int num_queries = 500;
  int num_actions = 10;
  int num_products = 40;
  double train_fraction = 0.9;
  // Phrases per action synonym group before spare labels go to products.
  int max_action_group = 3;
  // Chance that an intent is also tagged by a second phrase of its group.
  double second_phrase_prob = 0.15;
  // Chance that a query keeps the action (drops the product).
  double keep_action_prob = 0.5;
  // Chance that a query mentions its attribute by a synonym phrase.
  double synonym_query_prob = 0.3;

  nlohmann::json ToJson() const;
  static GeneratorConfig FromJson(const nlohmann::json& j);
};

enum class Attribute { kAction, kProduct };

struct IntentAttributes {
  int action = 0;
  int product = 0;
};

// Provenance of one generated query: which attribute value was kept.
struct QueryOrigin {
  Attribute kept = Attribute::kAction;
  int value = 0;
};

struct Benchmark {
  Corpus corpus;
  std::vector<std::string> actions;
  std::vector<std::string> products;
  std::vector<IntentAttributes> intent_attributes;  // indexed by intent id
  std::vector<QueryOrigin> query_origins;           // parallel to queries
};

// Deterministic in (cfg, seed). Throws ConfigError for infeasible shapes,
// e.g. fewer labels than distinct attribute values.
Benchmark GenerateBenchmark(const GeneratorConfig& cfg, uint64_t seed);

}  // namespace clarify

#endif  // CLARIFY_INVENTORY_GENERATOR_H_
