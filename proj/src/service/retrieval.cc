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

#include "clarify/service/retrieval.h"

#include <algorithm>
#include <cmath>

#include "clarify/common/errors.h"

namespace clarify {

Bm25Index::Bm25Index(std::shared_ptr<const Inventory> inv, Bm25Params params,
                     TokenizerScheme scheme)
    : inv_(std::move(inv)), params_(params), scheme_(scheme) {
  if (params_.k1 < 0.0 || params_.b < 0.0 || params_.b > 1.0) {
    throw ConfigError("BM25 needs k1 >= 0 and b in [0, 1]");
  }
  const size_t n = inv_->num_intents();
  term_freq_.resize(n);
  doc_length_.resize(n);
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const std::vector<std::string> tokens =
        Tokenize(inv_->intents()[i].text, scheme_);
    for (const std::string& t : tokens) ++term_freq_[i][t];
    for (const auto& [t, tf] : term_freq_[i]) ++doc_freq_[t];
    doc_length_[i] = static_cast<double>(tokens.size());
    total += doc_length_[i];
  }
  avg_length_ = n > 0 ? total / static_cast<double>(n) : 0.0;
}

std::vector<double> Bm25Index::ScoreAll(
    const std::vector<std::string>& tokens) const {
  const size_t n = inv_->num_intents();
  std::vector<double> scores(n, 0.0);
  const double docs = static_cast<double>(n);
  for (const std::string& t : tokens) {
    auto df_it = doc_freq_.find(t);
    if (df_it == doc_freq_.end()) continue;
    const double df = static_cast<double>(df_it->second);
    const double idf = std::log(1.0 + (docs - df + 0.5) / (df + 0.5));
    for (size_t i = 0; i < n; ++i) {
      auto tf_it = term_freq_[i].find(t);
      if (tf_it == term_freq_[i].end()) continue;
      const double tf = static_cast<double>(tf_it->second);
      const double norm =
          params_.k1 *
          (1.0 - params_.b +
           params_.b * (avg_length_ > 0.0 ? doc_length_[i] / avg_length_ : 0.0));
      scores[i] += idf * tf * (params_.k1 + 1.0) / (tf + norm);
    }
  }
  return scores;
}

double Bm25Index::Score(std::string_view query, IntentId id) const {
  if (!inv_->HasIntent(id)) throw PreconditionError("unknown intent id");
  return ScoreAll(Tokenize(query, scheme_))[id.index()];
}

RetrievalResult Bm25Index::Retrieve(std::string_view query, size_t k) const {
  RetrievalResult out;
  const std::vector<std::string> tokens = Tokenize(query, scheme_);
  out.empty_query = tokens.empty();
  const std::vector<double> scores = ScoreAll(tokens);
  std::vector<ScoredIntent> ranked;
  ranked.reserve(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    ranked.push_back({IntentId(static_cast<int32_t>(i)), scores[i]});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const ScoredIntent& a, const ScoredIntent& b) {
                     return a.score > b.score;
                   });
  if (reranker_) reranker_(query, ranked);
  ranked.resize(std::min(k, ranked.size()));
  out.intents = std::move(ranked);
  return out;
}

std::string ConcatenateQuery(std::string_view query, std::string_view phrase) {
  std::string out(query);
  out += ' ';
  out += phrase;
  return out;
}

}  // namespace clarify
