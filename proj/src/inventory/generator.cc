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

#include "clarify/inventory/generator.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>

#include "clarify/common/errors.h"
#include "clarify/common/random.h"

namespace clarify {

using nlohmann::json;

json GeneratorConfig::ToJson() const {
  return {{"num_intents", num_intents},
          {"num_labels", num_labels},
          {"num_queries", num_queries},
          {"num_actions", num_actions},
          {"num_products", num_products},
          {"train_fraction", train_fraction},
          {"max_action_group", max_action_group},
          {"second_phrase_prob", second_phrase_prob},
          {"keep_action_prob", keep_action_prob},
          {"synonym_query_prob", synonym_query_prob}};
}

GeneratorConfig GeneratorConfig::FromJson(const json& j) {
  GeneratorConfig c;
  c.num_intents = j.value("num_intents", c.num_intents);
  c.num_labels = j.value("num_labels", c.num_labels);
  c.num_queries = j.value("num_queries", c.num_queries);
  c.num_actions = j.value("num_actions", c.num_actions);
  c.num_products = j.value("num_products", c.num_products);
  c.train_fraction = j.value("train_fraction", c.train_fraction);
  c.max_action_group = j.value("max_action_group", c.max_action_group);
  c.second_phrase_prob = j.value("second_phrase_prob", c.second_phrase_prob);
  c.keep_action_prob = j.value("keep_action_prob", c.keep_action_prob);
  c.synonym_query_prob = j.value("synonym_query_prob", c.synonym_query_prob);
  return c;
}

namespace {

constexpr std::array kActionWords = {
    "apply",  "cancel",   "activate", "close",    "renew",   "upgrade",
    "report", "update",   "check",    "pay",      "reset",   "open",
    "freeze", "unlock",   "replace",  "claim",    "verify",  "refund",
    "change", "download", "redeem",   "withdraw", "deposit", "link"};

constexpr std::array kActionSuffixes = {"online", "request", "process",
                                        "steps"};

constexpr std::array kQualifiers = {
    "credit", "debit",  "gold",   "home",    "car",   "student",
    "travel", "health", "family", "savings", "qr",    "mobile",
    "youth",  "senior", "pet",    "premium", "smart", "business"};

constexpr std::array kNouns = {"card",    "loan",  "account", "insurance",
                               "code",    "bill",  "wallet",  "pension"};

constexpr std::array kProductSuffixes = {"service", "plan", "details"};

constexpr std::array kActionTemplates = {
    "how to {}", "how do i {}", "i want to {}", "can i {}",
    "{}",        "help me {}",  "where to {}"};

constexpr std::array kProductTemplates = {
    "{}", "my {}", "about {}", "{} question", "help with {}",
    "problem with my {}"};

std::string Fill(std::string_view pattern, const std::string& value) {
  std::string out(pattern);
  const auto pos = out.find("{}");
  out.replace(pos, 2, value);
  return out;
}

std::vector<std::string> MakeActionNames(int n, Rng& rng) {
  std::vector<std::string> names(kActionWords.begin(), kActionWords.end());
  Shuffle(names, rng);
  names.resize(std::min<size_t>(names.size(), n));
  for (int i = static_cast<int>(names.size()); i < n; ++i) {
    names.push_back("action" + std::to_string(i));
  }
  return names;
}

std::vector<std::string> MakeProductNames(int n, Rng& rng) {
  std::vector<std::string> names;
  for (const char* q : kQualifiers) {
    for (const char* noun : kNouns) {
      if (std::string_view(q) == noun) continue;
      names.push_back(std::string(q) + " " + noun);
    }
  }
  Shuffle(names, rng);
  names.resize(std::min<size_t>(names.size(), n));
  for (int i = static_cast<int>(names.size()); i < n; ++i) {
    names.push_back("product" + std::to_string(i));
  }
  return names;
}

// Phrases of one synonym group: the base name followed by suffixed variants.
template <size_t K>
std::vector<std::string> GroupPhrases(const std::string& base, int size,
                                      const std::array<const char*, K>& sfx) {
  std::vector<std::string> phrases = {base};
  for (int i = 1; i < size; ++i) {
    const size_t s = static_cast<size_t>(i - 1);
    std::string phrase = base + " " + sfx[s % K];
    if (s >= K) phrase += " " + std::to_string(s / K + 1);
    phrases.push_back(std::move(phrase));
  }
  return phrases;
}

}  // namespace

Benchmark GenerateBenchmark(const GeneratorConfig& cfg, uint64_t seed) {
  if (cfg.num_actions < 1 || cfg.num_products < 1) {
    throw ConfigError("generator needs at least one action and one product");
  }
  const int distinct_values = cfg.num_actions + cfg.num_products;
  if (cfg.num_labels < distinct_values) {
    throw ConfigError("label count " + std::to_string(cfg.num_labels) +
                      " is below the " + std::to_string(distinct_values) +
                      " distinct attribute values");
  }
  const int64_t grid =
      static_cast<int64_t>(cfg.num_actions) * cfg.num_products;
  if (cfg.num_intents < std::max(cfg.num_actions, cfg.num_products) ||
      cfg.num_intents > grid) {
    throw ConfigError("intent count must lie in [max(actions, products), "
                      "actions * products]");
  }
  if (cfg.num_queries < 0 || cfg.train_fraction < 0.0 ||
      cfg.train_fraction > 1.0) {
    throw ConfigError("invalid query count or train fraction");
  }

  Rng rng = MakeRng(seed);
  Benchmark bench;
  bench.actions = MakeActionNames(cfg.num_actions, rng);
  bench.products = MakeProductNames(cfg.num_products, rng);

  // Intents: every attribute value appears at least once, the rest of the
  // grid is sampled uniformly.
  std::set<std::pair<int, int>> pairs;
  for (int p = 0; p < cfg.num_products; ++p) {
    pairs.insert({static_cast<int>(UniformIndex(rng, cfg.num_actions)), p});
  }
  for (int a = 0; a < cfg.num_actions; ++a) {
    bool present = false;
    for (const auto& [pa, pp] : pairs) present |= (pa == a);
    if (!present) {
      // Reuse a product so the count stays within budget.
      pairs.insert({a, static_cast<int>(UniformIndex(rng, cfg.num_products))});
    }
  }
  std::vector<std::pair<int, int>> rest;
  for (int a = 0; a < cfg.num_actions; ++a) {
    for (int p = 0; p < cfg.num_products; ++p) {
      if (!pairs.count({a, p})) rest.push_back({a, p});
    }
  }
  Shuffle(rest, rng);
  for (size_t i = 0; pairs.size() < static_cast<size_t>(cfg.num_intents) &&
                     i < rest.size();
       ++i) {
    pairs.insert(rest[i]);
  }

  // Intent ids follow text order.
  std::vector<std::pair<std::string, IntentAttributes>> texts;
  for (const auto& [a, p] : pairs) {
    texts.push_back({bench.actions[a] + " " + bench.products[p], {a, p}});
  }
  std::sort(texts.begin(), texts.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<Intent> intents;
  for (size_t i = 0; i < texts.size(); ++i) {
    const auto& [a, p] = texts[i].second;
    intents.push_back(Intent{
        IntentId(static_cast<int32_t>(i)), texts[i].first,
        "To " + texts[i].first + ", open the app and follow the " +
            bench.products[p] + " " + bench.actions[a] + " guide."});
    bench.intent_attributes.push_back(texts[i].second);
  }

  // Synonym groups: spare labels fill action groups first, then product
  // groups, then round-robin.
  std::vector<int> action_group(cfg.num_actions, 1);
  std::vector<int> product_group(cfg.num_products, 1);
  int spare = cfg.num_labels - distinct_values;
  for (int round = 1; round < cfg.max_action_group && spare > 0; ++round) {
    for (int a = 0; a < cfg.num_actions && spare > 0; ++a, --spare) {
      ++action_group[a];
    }
  }
  std::vector<int> product_order(cfg.num_products);
  for (int p = 0; p < cfg.num_products; ++p) product_order[p] = p;
  Shuffle(product_order, rng);
  for (size_t i = 0; spare > 0; ++i, --spare) {
    ++product_group[product_order[i % product_order.size()]];
  }

  std::vector<std::vector<IntentId>> by_action(cfg.num_actions);
  std::vector<std::vector<IntentId>> by_product(cfg.num_products);
  for (const Intent& intent : intents) {
    const auto& attr = bench.intent_attributes[intent.id.index()];
    by_action[attr.action].push_back(intent.id);
    by_product[attr.product].push_back(intent.id);
  }

  std::map<std::string, IntentSet> phrase_intents;
  std::vector<std::vector<std::string>> action_phrases(cfg.num_actions);
  std::vector<std::vector<std::string>> product_phrases(cfg.num_products);
  auto assign_group = [&](const std::vector<std::string>& phrases,
                          std::vector<IntentId> members) {
    Shuffle(members, rng);
    const size_t g = phrases.size();
    for (size_t i = 0; i < members.size(); ++i) {
      const size_t first = i < g ? i : UniformIndex(rng, g);
      phrase_intents[phrases[first]].push_back(members[i]);
      if (g > 1 && UniformUnit(rng) < cfg.second_phrase_prob) {
        const size_t second = (first + 1 + UniformIndex(rng, g - 1)) % g;
        phrase_intents[phrases[second]].push_back(members[i]);
      }
    }
    // Groups larger than their attribute's intent count still need every
    // phrase mapped.
    for (size_t k = members.size(); k < g; ++k) {
      phrase_intents[phrases[k]].push_back(
          members[UniformIndex(rng, members.size())]);
    }
  };
  for (int a = 0; a < cfg.num_actions; ++a) {
    action_phrases[a] =
        GroupPhrases(bench.actions[a], action_group[a], kActionSuffixes);
    assign_group(action_phrases[a], by_action[a]);
  }
  for (int p = 0; p < cfg.num_products; ++p) {
    product_phrases[p] =
        GroupPhrases(bench.products[p], product_group[p], kProductSuffixes);
    assign_group(product_phrases[p], by_product[p]);
  }

  // Label ids follow phrase order, so id order is lexicographic.
  std::vector<Label> labels;
  std::vector<IntentSet> label_intents;
  for (auto& [phrase, mapped] : phrase_intents) {
    Normalize(mapped);
    labels.push_back(Label{LabelId(static_cast<int32_t>(labels.size())),
                           phrase});
    label_intents.push_back(mapped);
  }
  if (labels.size() != static_cast<size_t>(cfg.num_labels)) {
    throw ConfigError("generated phrases collide; got " +
                      std::to_string(labels.size()) + " labels");
  }
  auto inventory = std::make_shared<Inventory>(
      std::move(intents), std::move(labels), std::move(label_intents));

  // Queries keep one attribute and drop the other.
  const size_t num_train = static_cast<size_t>(
      std::llround(cfg.train_fraction * cfg.num_queries));
  std::vector<size_t> order(static_cast<size_t>(cfg.num_queries));
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Shuffle(order, rng);
  std::vector<Split> splits(order.size(), Split::kTest);
  for (size_t i = 0; i < num_train && i < order.size(); ++i) {
    splits[order[i]] = Split::kTrain;
  }
  for (int i = 0; i < cfg.num_queries; ++i) {
    const auto& attr =
        bench.intent_attributes[UniformIndex(rng, inventory->num_intents())];
    QueryOrigin origin;
    const std::vector<std::string>* group = nullptr;
    if (UniformUnit(rng) < cfg.keep_action_prob) {
      origin = {Attribute::kAction, attr.action};
      group = &action_phrases[attr.action];
    } else {
      origin = {Attribute::kProduct, attr.product};
      group = &product_phrases[attr.product];
    }
    std::string phrase = group->front();
    if (group->size() > 1 && UniformUnit(rng) < cfg.synonym_query_prob) {
      phrase = (*group)[1 + UniformIndex(rng, group->size() - 1)];
    }
    std::string text;
    IntentSet potential;
    if (origin.kept == Attribute::kAction) {
      text = Fill(kActionTemplates[UniformIndex(rng, kActionTemplates.size())],
                  phrase);
      potential = by_action[origin.value];
    } else {
      text = Fill(
          kProductTemplates[UniformIndex(rng, kProductTemplates.size())],
          phrase);
      potential = by_product[origin.value];
    }
    bench.corpus.queries.emplace_back(std::move(text), std::move(potential),
                                      splits[i]);
    bench.query_origins.push_back(origin);
  }
  bench.corpus.inventory = std::move(inventory);
  bench.corpus.seed = seed;
  return bench;
}

}  // namespace clarify
