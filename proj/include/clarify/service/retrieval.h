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

#ifndef CLARIFY_SERVICE_RETRIEVAL_H_
#define CLARIFY_SERVICE_RETRIEVAL_H_

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clarify/common/ids.h"
#include "clarify/inventory/inventory.h"
#include "clarify/inventory/tokenizer.h"

namespace clarify {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct ScoredIntent {
  IntentId id;
  double score = 0.0;
};

struct RetrievalResult {
  std::vector<ScoredIntent> intents;
  // The query had no tokens; results are the lowest-id intents.
  bool empty_query = false;
};

// Reorders or rescores the lexical candidates in place. Retrieval runs it on
// the top candidates before truncating to k.
using Reranker =
    std::function<void(std::string_view query, std::vector<ScoredIntent>&)>;

// Okapi BM25 over intent texts, one document per intent.
//   idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5))
//   score  = sum over query tokens (with repeats) of
//            idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl))
class Bm25Index {
 public:
  Bm25Index(std::shared_ptr<const Inventory> inv, Bm25Params params = {},
            TokenizerScheme scheme = TokenizerScheme::kWhitespace);

  // Descending score, ties to the smallest intent id; min(k, |intents|)
  // results.
  RetrievalResult Retrieve(std::string_view query, size_t k) const;

  double Score(std::string_view query, IntentId id) const;

  void set_reranker(Reranker reranker) { reranker_ = std::move(reranker); }
  const Bm25Params& params() const { return params_; }
  const Inventory& inventory() const { return *inv_; }

 private:
  std::vector<double> ScoreAll(const std::vector<std::string>& tokens) const;

  std::shared_ptr<const Inventory> inv_;
  Bm25Params params_;
  TokenizerScheme scheme_;
  std::vector<std::unordered_map<std::string, int>> term_freq_;
  std::vector<double> doc_length_;
  std::unordered_map<std::string, int> doc_freq_;
  double avg_length_ = 0.0;
  Reranker reranker_;
};

// Query sent to retrieval after a label click: single-space join.
std::string ConcatenateQuery(std::string_view query, std::string_view phrase);

}  // namespace clarify

#endif  // CLARIFY_SERVICE_RETRIEVAL_H_
