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

#include "clarify/inventory/inventory.h"

#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "clarify/common/errors.h"
#include "clarify/common/random.h"

namespace clarify {

using nlohmann::json;

Inventory::Inventory(std::vector<Intent> intents, std::vector<Label> labels,
                     std::vector<IntentSet> label_intents)
    : intents_(std::move(intents)),
      labels_(std::move(labels)),
      label_intents_(std::move(label_intents)) {
  if (label_intents_.size() != labels_.size()) {
    throw ValidationError("label mapping count does not match label count");
  }
  std::unordered_set<std::string> seen;
  for (size_t i = 0; i < intents_.size(); ++i) {
    const Intent& intent = intents_[i];
    if (intent.id != IntentId(static_cast<int32_t>(i))) {
      throw ValidationError("intent ids must be contiguous from 0; record " +
                            std::to_string(i) + " has id " +
                            std::to_string(intent.id.value()));
    }
    if (intent.text.empty()) {
      throw ValidationError("intent " + std::to_string(i) + " has empty text");
    }
    if (!seen.insert(intent.text).second) {
      throw ValidationError("intent " + std::to_string(i) +
                            " duplicates text '" + intent.text + "'");
    }
  }
  seen.clear();
  intent_labels_.assign(intents_.size(), {});
  for (size_t i = 0; i < labels_.size(); ++i) {
    const Label& label = labels_[i];
    const std::string where = "label " + std::to_string(i);
    if (label.id != LabelId(static_cast<int32_t>(i))) {
      throw ValidationError("label ids must be contiguous from 0; record " +
                            std::to_string(i) + " has id " +
                            std::to_string(label.id.value()));
    }
    if (label.phrase.empty()) {
      throw ValidationError(where + " has empty phrase");
    }
    if (!seen.insert(label.phrase).second) {
      throw ValidationError(where + " duplicates phrase '" + label.phrase +
                            "'");
    }
    IntentSet& mapped = label_intents_[i];
    if (mapped.empty()) {
      throw ValidationError(where + " ('" + label.phrase +
                            "') maps to no intent");
    }
    std::sort(mapped.begin(), mapped.end());
    for (size_t k = 0; k < mapped.size(); ++k) {
      if (!HasIntent(mapped[k])) {
        throw ValidationError(where + " ('" + label.phrase +
                              "') references unknown intent " +
                              std::to_string(mapped[k].value()));
      }
      if (k > 0 && mapped[k] == mapped[k - 1]) {
        throw ValidationError(where + " ('" + label.phrase +
                              "') lists intent " +
                              std::to_string(mapped[k].value()) + " twice");
      }
      intent_labels_[mapped[k].index()].push_back(label.id);
    }
  }
}

const Intent& Inventory::intent(IntentId id) const {
  if (!HasIntent(id)) {
    throw PreconditionError("unknown intent id " + std::to_string(id.value()));
  }
  return intents_[id.index()];
}

const Label& Inventory::label(LabelId id) const {
  if (!HasLabel(id)) {
    throw PreconditionError("unknown label id " + std::to_string(id.value()));
  }
  return labels_[id.index()];
}

const IntentSet& Inventory::IntentsOf(LabelId id) const {
  if (!HasLabel(id)) {
    throw PreconditionError("unknown label id " + std::to_string(id.value()));
  }
  return label_intents_[id.index()];
}

const std::vector<LabelId>& Inventory::LabelsOf(IntentId id) const {
  if (!HasIntent(id)) {
    throw PreconditionError("unknown intent id " + std::to_string(id.value()));
  }
  return intent_labels_[id.index()];
}

uint64_t Inventory::Hash() const {
  const std::string canonical = InventoryToJson(*this).dump();
  return Fnv1a(std::span(reinterpret_cast<const uint8_t*>(canonical.data()),
                         canonical.size()));
}

const char* SplitName(Split split) {
  return split == Split::kTrain ? "train" : "test";
}

Split ParseSplit(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "test") return Split::kTest;
  throw ParseError("unknown split '" + name + "'");
}

AnnotatedQuery::AnnotatedQuery(std::string text, IntentSet potential_intents,
                               Split split)
    : text_(std::move(text)),
      potential_intents_(std::move(potential_intents)),
      split_(split) {
  Normalize(potential_intents_);
  if (potential_intents_.empty()) {
    throw PreconditionError("query '" + text_ +
                            "' has an empty potential-intent set");
  }
}

std::vector<uint8_t> AnnotatedQuery::Indicator(size_t num_intents) const {
  std::vector<uint8_t> out(num_intents, 0);
  for (IntentId id : potential_intents_) {
    if (id.index() >= num_intents) {
      throw PreconditionError("potential intent outside the universe");
    }
    out[id.index()] = 1;
  }
  return out;
}

std::vector<const AnnotatedQuery*> Corpus::Select(Split split) const {
  std::vector<const AnnotatedQuery*> out;
  for (const AnnotatedQuery& q : queries) {
    if (q.split() == split) out.push_back(&q);
  }
  return out;
}

std::vector<LabelId> CandidateLabels(const Inventory& inv,
                                     const AnnotatedQuery& query) {
  std::vector<LabelId> out;
  for (IntentId s : query.potential_intents()) {
    const auto& labels = inv.LabelsOf(s);
    out.insert(out.end(), labels.begin(), labels.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::map<IntentId, double> IntentProbabilities(const AnnotatedQuery& query) {
  const auto& q = query.potential_intents();
  std::map<IntentId, double> out;
  const double mass = 1.0 / static_cast<double>(q.size());
  for (IntentId s : q) out.emplace(s, mass);
  return out;
}

// --- Serialization ---------------------------------------------------------

json InventoryToJson(const Inventory& inv) {
  json intents = json::array();
  for (const Intent& intent : inv.intents()) {
    intents.push_back({{"id", intent.id.value()},
                       {"text", intent.text},
                       {"answer", intent.answer}});
  }
  json labels = json::array();
  for (const Label& label : inv.labels()) {
    json ids = json::array();
    for (IntentId s : inv.IntentsOf(label.id)) ids.push_back(s.value());
    labels.push_back(
        {{"id", label.id.value()}, {"phrase", label.phrase}, {"intents", ids}});
  }
  return {{"intents", std::move(intents)}, {"labels", std::move(labels)}};
}

namespace {

template <typename Id, typename Record>
std::vector<Record> SortById(std::vector<std::pair<int32_t, Record>> records,
                             const char* kind) {
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Record> out;
  for (size_t i = 0; i < records.size(); ++i) {
    if (records[i].first != static_cast<int32_t>(i)) {
      throw ValidationError(std::string(kind) +
                            " ids must be contiguous from 0; missing or "
                            "duplicate id near " +
                            std::to_string(records[i].first));
    }
    out.push_back(std::move(records[i].second));
  }
  return out;
}

}  // namespace

Inventory InventoryFromJson(const json& j) {
  try {
    std::vector<std::pair<int32_t, Intent>> intents;
    for (const json& rec : j.at("intents")) {
      const int32_t id = rec.at("id").get<int32_t>();
      intents.push_back({id, Intent{IntentId(id), rec.at("text"),
                                    rec.value("answer", std::string())}});
    }
    std::vector<std::pair<int32_t, std::pair<Label, IntentSet>>> labels;
    for (const json& rec : j.at("labels")) {
      const int32_t id = rec.at("id").get<int32_t>();
      IntentSet mapped;
      for (const json& s : rec.at("intents")) {
        mapped.push_back(IntentId(s.get<int32_t>()));
      }
      labels.push_back(
          {id, {Label{LabelId(id), rec.at("phrase")}, std::move(mapped)}});
    }
    auto sorted_intents = SortById<IntentId>(std::move(intents), "intent");
    auto sorted_labels = SortById<LabelId>(std::move(labels), "label");
    std::vector<Label> label_records;
    std::vector<IntentSet> label_intents;
    for (auto& [label, mapped] : sorted_labels) {
      label_records.push_back(std::move(label));
      label_intents.push_back(std::move(mapped));
    }
    return Inventory(std::move(sorted_intents), std::move(label_records),
                     std::move(label_intents));
  } catch (const json::exception& e) {
    throw ParseError(std::string("inventory: ") + e.what());
  }
}

Inventory LoadInventory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open inventory file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return InventoryFromJson(j);
}

void SaveInventory(const Inventory& inv, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << InventoryToJson(inv).dump(1) << "\n";
}

std::vector<AnnotatedQuery> LoadQueries(const std::filesystem::path& path,
                                        const Inventory& inv) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open query file " + path.string());
  std::vector<AnnotatedQuery> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    try {
      IntentSet ids;
      for (const json& s : rec.at("intent_ids")) {
        const IntentId id(s.get<int32_t>());
        if (!inv.HasIntent(id)) {
          throw ValidationError(where + ": unknown intent " +
                                std::to_string(id.value()));
        }
        ids.push_back(id);
      }
      out.emplace_back(rec.at("text").get<std::string>(), std::move(ids),
                       ParseSplit(rec.value("split", std::string("train"))));
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    } catch (const PreconditionError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return out;
}

void SaveQueries(const std::vector<AnnotatedQuery>& queries,
                 const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const AnnotatedQuery& q : queries) {
    json ids = json::array();
    for (IntentId s : q.potential_intents()) ids.push_back(s.value());
    out << json{{"text", q.text()},
                {"intent_ids", ids},
                {"split", SplitName(q.split())}}
               .dump()
        << "\n";
  }
}

Corpus LoadCorpus(const std::filesystem::path& dir) {
  Corpus corpus;
  auto inv = std::make_shared<Inventory>(LoadInventory(dir / "inventory.json"));
  corpus.queries = LoadQueries(dir / "queries.jsonl", *inv);
  corpus.inventory = std::move(inv);
  std::ifstream meta(dir / "corpus.json");
  if (meta) {
    try {
      json j;
      meta >> j;
      corpus.seed = j.value("seed", uint64_t{0});
    } catch (const json::exception& e) {
      throw ParseError((dir / "corpus.json").string() + ": " + e.what());
    }
  }
  return corpus;
}

void SaveCorpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  SaveInventory(*corpus.inventory, dir / "inventory.json");
  SaveQueries(corpus.queries, dir / "queries.jsonl");
  std::ofstream meta(dir / "corpus.json");
  meta << json{{"seed", corpus.seed},
               {"num_queries", corpus.queries.size()},
               {"inventory_hash", corpus.inventory->Hash()}}
              .dump(1)
       << "\n";
}

}  // namespace clarify
