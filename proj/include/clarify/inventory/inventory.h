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

#ifndef CLARIFY_INVENTORY_INVENTORY_H_
#define CLARIFY_INVENTORY_INVENTORY_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "clarify/common/ids.h"
#include "clarify/common/intent_set.h"
#include "json.hpp"

namespace clarify {

struct Intent {
  IntentId id;
  std::string text;
  std::string answer;

  friend bool operator==(const Intent&, const Intent&) = default;
};

struct Label {
  LabelId id;
  std::string phrase;

  friend bool operator==(const Label&, const Label&) = default;
};

// Closed-domain universe of intents and labels plus the many-to-many mapping
// between them. Immutable once constructed; every constructor path validates.
class Inventory {
 public:
  // label_intents[i] is the intent set of labels[i]. Throws ValidationError
  // naming the offending record when an invariant is broken.
  Inventory(std::vector<Intent> intents, std::vector<Label> labels,
            std::vector<IntentSet> label_intents);

  size_t num_intents() const { return intents_.size(); }
  size_t num_labels() const { return labels_.size(); }

  const std::vector<Intent>& intents() const { return intents_; }
  const std::vector<Label>& labels() const { return labels_; }

  const Intent& intent(IntentId id) const;
  const Label& label(LabelId id) const;

  // The mapped intent set of a label.
  const IntentSet& IntentsOf(LabelId id) const;
  // Inverse mapping, sorted by label id.
  const std::vector<LabelId>& LabelsOf(IntentId id) const;

  bool HasIntent(IntentId id) const {
    return id.value() >= 0 && id.index() < intents_.size();
  }
  bool HasLabel(LabelId id) const {
    return id.value() >= 0 && id.index() < labels_.size();
  }

  // Stable content hash used to tie checkpoints to the inventory they were
  // trained on.
  uint64_t Hash() const;

  friend bool operator==(const Inventory& a, const Inventory& b) {
    return a.intents_ == b.intents_ && a.labels_ == b.labels_ &&
           a.label_intents_ == b.label_intents_;
  }

 private:
  std::vector<Intent> intents_;
  std::vector<Label> labels_;
  std::vector<IntentSet> label_intents_;
  std::vector<std::vector<LabelId>> intent_labels_;
};

enum class Split { kTrain, kTest };

const char* SplitName(Split split);
Split ParseSplit(const std::string& name);

// An ambiguous query with its annotated potential-intent set.
class AnnotatedQuery {
 public:
  // Throws PreconditionError when potential_intents is empty.
  AnnotatedQuery(std::string text, IntentSet potential_intents,
                 Split split = Split::kTrain);

  const std::string& text() const { return text_; }
  const IntentSet& potential_intents() const { return potential_intents_; }
  Split split() const { return split_; }

  // Indicator vector over the whole intent universe.
  std::vector<uint8_t> Indicator(size_t num_intents) const;

  friend bool operator==(const AnnotatedQuery&,
                         const AnnotatedQuery&) = default;

 private:
  std::string text_;
  IntentSet potential_intents_;
  Split split_;
};

struct Corpus {
  std::shared_ptr<const Inventory> inventory;
  std::vector<AnnotatedQuery> queries;
  uint64_t seed = 0;

  std::vector<const AnnotatedQuery*> Select(Split split) const;
  std::vector<const AnnotatedQuery*> Train() const {
    return Select(Split::kTrain);
  }
  std::vector<const AnnotatedQuery*> Test() const {
    return Select(Split::kTest);
  }
};

// Labels whose mapped intents intersect the query's potential intents, i.e.
// the pruned action space. Sorted by id.
std::vector<LabelId> CandidateLabels(const Inventory& inv,
                                     const AnnotatedQuery& query);

// Uniform mass over the potential intents; intents outside the set are
// absent from the map and carry zero mass.
std::map<IntentId, double> IntentProbabilities(const AnnotatedQuery& query);

// --- Serialization ---------------------------------------------------------

nlohmann::json InventoryToJson(const Inventory& inv);
Inventory InventoryFromJson(const nlohmann::json& j);

Inventory LoadInventory(const std::filesystem::path& path);
void SaveInventory(const Inventory& inv, const std::filesystem::path& path);

// One JSON object per line: {text, intent_ids, split}.
std::vector<AnnotatedQuery> LoadQueries(const std::filesystem::path& path,
                                        const Inventory& inv);
void SaveQueries(const std::vector<AnnotatedQuery>& queries,
                 const std::filesystem::path& path);

// A corpus directory holds inventory.json, queries.jsonl and corpus.json.
Corpus LoadCorpus(const std::filesystem::path& dir);
void SaveCorpus(const Corpus& corpus, const std::filesystem::path& dir);

}  // namespace clarify

#endif  // CLARIFY_INVENTORY_INVENTORY_H_
