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

#include "support/fixtures.h"

#include <set>

namespace clarify::testing {

namespace {

const std::vector<std::string>& Words() {
  static const std::vector<std::string> kWords = {
      "apply", "cancel", "card", "loan", "credit", "code", "reset",
      "bill",  "refund", "fee",  "limit", "online", "app",  "account"};
  return kWords;
}

std::string RandomPhrase(Rng& rng, int min_words, int max_words) {
  const int n = min_words + static_cast<int>(UniformIndex(
                                rng, static_cast<size_t>(max_words - min_words + 1)));
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (i > 0) out += ' ';
    out += Words()[UniformIndex(rng, Words().size())];
  }
  return out;
}

// Unique phrase; falls back to a numbered one after a few collisions.
std::string UniquePhrase(Rng& rng, std::set<std::string>& seen, int min_words,
                         int max_words, const std::string& fallback) {
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::string p = RandomPhrase(rng, min_words, max_words);
    if (seen.insert(p).second) return p;
  }
  seen.insert(fallback);
  return fallback;
}

IntentSet RandomSubset(Rng& rng, const IntentSet& pool, double density) {
  IntentSet out;
  for (IntentId s : pool) {
    if (UniformUnit(rng) < density) out.push_back(s);
  }
  if (out.empty()) out.push_back(pool[UniformIndex(rng, pool.size())]);
  return out;
}

int Between(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(UniformIndex(rng, static_cast<size_t>(hi - lo + 1)));
}

std::vector<Intent> RandomIntents(Rng& rng, int n) {
  std::vector<Intent> intents;
  std::set<std::string> seen;
  for (int i = 0; i < n; ++i) {
    intents.push_back({IntentId(i),
                       UniquePhrase(rng, seen, 1, 4, "intent" + std::to_string(i)),
                       "answer " + std::to_string(i)});
  }
  return intents;
}

}  // namespace

std::shared_ptr<const Inventory> F1Inventory() {
  std::vector<Intent> intents = {
      {IntentId(0), "apply credit card", "Credit card applications open in the app."},
      {IntentId(1), "apply loan", "Loan applications need proof of income."},
      {IntentId(2), "apply QR code", "QR codes are issued under Payments."},
      {IntentId(3), "cancel credit card", "Call support to cancel a card."}};
  std::vector<Label> labels = {{LabelId(0), "apply"},
                               {LabelId(1), "credit card"},
                               {LabelId(2), "loan"},
                               {LabelId(3), "QR code"},
                               {LabelId(4), "cancel"}};
  std::vector<IntentSet> mapping = {
      {IntentId(0), IntentId(1), IntentId(2)},
      {IntentId(0), IntentId(3)},
      {IntentId(1)},
      {IntentId(2)},
      {IntentId(3)}};
  return std::make_shared<const Inventory>(std::move(intents), std::move(labels),
                                           std::move(mapping));
}

AnnotatedQuery F1Query() {
  return AnnotatedQuery("how to apply", {IntentId(0), IntentId(1), IntentId(2)});
}

Corpus F1Corpus() {
  Corpus corpus;
  corpus.inventory = F1Inventory();
  corpus.queries.push_back(F1Query());
  corpus.queries.emplace_back("how to apply", F1Query().potential_intents(),
                              Split::kTest);
  corpus.seed = 0;
  return corpus;
}

std::shared_ptr<const Inventory> RandomInventory(
    Rng& rng, const RandomInventoryOptions& opts) {
  const int num_intents = Between(rng, opts.min_intents, opts.max_intents);
  const int num_labels = Between(rng, opts.min_labels, opts.max_labels);
  std::vector<Intent> intents = RandomIntents(rng, num_intents);
  IntentSet all;
  for (int i = 0; i < num_intents; ++i) all.push_back(IntentId(i));

  std::vector<Label> labels;
  std::vector<IntentSet> mapping;
  std::set<std::string> seen;
  const double density = 0.1 + 0.5 * UniformUnit(rng);
  for (int i = 0; i < num_labels; ++i) {
    labels.push_back(
        {LabelId(i), UniquePhrase(rng, seen, 1, 2, "label" + std::to_string(i))});
    mapping.push_back(RandomSubset(rng, all, density));
  }
  return std::make_shared<const Inventory>(std::move(intents), std::move(labels),
                                           std::move(mapping));
}

AnnotatedQuery RandomQuery(Rng& rng, const Inventory& inv, Split split) {
  IntentSet all;
  for (const Intent& s : inv.intents()) all.push_back(s.id);
  const double density = 0.1 + 0.6 * UniformUnit(rng);
  return AnnotatedQuery(RandomPhrase(rng, 1, 3), RandomSubset(rng, all, density),
                        split);
}

Trajectory RandomTrajectory(Rng& rng, const Inventory& inv, int max_length) {
  std::vector<LabelId> pool;
  for (const Label& x : inv.labels()) pool.push_back(x.id);
  Shuffle(pool, rng);
  const size_t length = std::min<size_t>(
      pool.size(), UniformIndex(rng, static_cast<size_t>(max_length) + 1));
  pool.resize(length);
  return Trajectory(std::move(pool));
}

Corpus RandomCorpus(Rng& rng, int num_queries,
                    const RandomInventoryOptions& opts) {
  Corpus corpus;
  corpus.inventory = RandomInventory(rng, opts);
  corpus.seed = rng();
  for (int i = 0; i < num_queries; ++i) {
    const Split split =
        i == 0 ? Split::kTest : (i == 1 ? Split::kTrain
                                        : (UniformUnit(rng) < 0.3 ? Split::kTest
                                                                  : Split::kTrain));
    corpus.queries.push_back(RandomQuery(rng, *corpus.inventory, split));
  }
  return corpus;
}

SearchInstance RandomSearchInstance(Rng& rng, int min_candidates,
                                    int max_candidates) {
  const int num_intents = Between(rng, 6, 14);
  const int q_size = Between(rng, 2, std::min(8, num_intents - 1));
  IntentSet all;
  for (int i = 0; i < num_intents; ++i) all.push_back(IntentId(i));
  std::vector<IntentId> shuffled = all;
  Shuffle(shuffled, rng);
  IntentSet potential(shuffled.begin(), shuffled.begin() + q_size);
  IntentSet others(shuffled.begin() + q_size, shuffled.end());
  Normalize(potential);
  Normalize(others);

  std::vector<Label> labels;
  std::vector<IntentSet> mapping;
  std::set<std::string> seen;
  auto add = [&](IntentSet cover) {
    const int i = static_cast<int>(labels.size());
    labels.push_back(
        {LabelId(i), UniquePhrase(rng, seen, 1, 2, "label" + std::to_string(i))});
    mapping.push_back(std::move(cover));
  };
  const int candidates = Between(rng, min_candidates, max_candidates);
  const int distractors = Between(rng, 0, 3);
  const double density = 0.2 + 0.5 * UniformUnit(rng);
  // Interleave candidates and distractors so candidate ids are not a prefix.
  int made_c = 0;
  int made_d = 0;
  while (made_c < candidates || made_d < distractors) {
    const bool candidate =
        made_d >= distractors ||
        (made_c < candidates && UniformUnit(rng) < 0.75);
    if (candidate) {
      IntentSet cover = RandomSubset(rng, potential, density);
      if (UniformUnit(rng) < 0.3) {
        cover = Union(cover, RandomSubset(rng, others, 0.2));
      }
      add(std::move(cover));
      ++made_c;
    } else {
      add(RandomSubset(rng, others, density));
      ++made_d;
    }
  }
  SearchInstance out{std::make_shared<const Inventory>(
                         RandomIntents(rng, num_intents), std::move(labels),
                         std::move(mapping)),
                     AnnotatedQuery("random query", potential)};
  return out;
}

}  // namespace clarify::testing
