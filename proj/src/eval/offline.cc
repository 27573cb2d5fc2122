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

#include "clarify/eval/offline.h"

#include <fmt/format.h>

#include <algorithm>

#include "clarify/common/errors.h"
#include "clarify/eval/metrics.h"
#include "clarify/policy/training.h"

namespace clarify {

const MethodScores& OfflineReport::Method(const std::string& name) const {
  for (const MethodScores& m : methods) {
    if (m.name == name) return m;
  }
  throw PreconditionError("no method named '" + name + "' in report");
}

nlohmann::json OfflineReport::ToJson() const {
  nlohmann::json j;
  j["corpus_seed"] = corpus_seed;
  j["inventory_hash"] = fmt::format("{:016x}", inventory_hash);
  j["n_values"] = n_values;
  j["tokenizer"] = tokenizer;
  j["upper_bound"] = upper_bound;
  j["inexact_upper_bounds"] = inexact_upper_bounds;
  j["methods"] = nlohmann::json::array();
  for (const MethodScores& m : methods) {
    j["methods"].push_back({{"name", m.name},
                            {"union_recall", m.union_recall},
                            {"sum_recall", m.sum_recall},
                            {"diversity", m.diversity},
                            {"overlap", m.overlap}});
  }
  j["queries"] = nlohmann::json::array();
  for (const QueryRow& q : queries) {
    nlohmann::json row = {{"text", q.text},
                          {"num_potential", q.num_potential},
                          {"num_candidates", q.num_candidates},
                          {"upper_bound", q.upper_bound},
                          {"upper_bound_exact", q.upper_bound_exact}};
    nlohmann::json per_method = nlohmann::json::object();
    for (size_t m = 0; m < methods.size(); ++m) {
      per_method[methods[m].name] = {{"union_recall", q.union_recall[m]},
                                     {"labels", q.labels[m]}};
    }
    row["methods"] = std::move(per_method);
    j["queries"].push_back(std::move(row));
  }
  return j;
}

std::string OfflineReport::ToText() const {
  size_t width = 11;
  for (const MethodScores& m : methods) width = std::max(width, m.name.size());
  std::string out;
  out += fmt::format("{:<{}}", "method", width);
  for (int n : n_values) out += fmt::format("  {:>8}", fmt::format("R@{}", n));
  for (int n : n_values) out += fmt::format("  {:>8}", fmt::format("sum@{}", n));
  out += fmt::format("  {:>8}  {:>8}\n", "div", "overlap");
  for (const MethodScores& m : methods) {
    out += fmt::format("{:<{}}", m.name, width);
    for (double r : m.union_recall) out += fmt::format("  {:>8.4f}", r);
    for (double r : m.sum_recall) out += fmt::format("  {:>8.4f}", r);
    out += fmt::format("  {:>8.4f}  {:>8.4f}\n", m.diversity, m.overlap);
  }
  out += fmt::format("{:<{}}", "upper bound", width);
  for (double r : upper_bound) out += fmt::format("  {:>8.4f}", r);
  out += "\n";
  out += fmt::format("queries {}, inexact bounds {}, corpus seed {}, inventory {:016x}\n",
                     queries.size(), inexact_upper_bounds, corpus_seed,
                     inventory_hash);
  return out;
}

namespace {

struct MethodResult {
  std::vector<double> union_recall;
  std::vector<double> sum_recall;
  double diversity = 0.0;
  double overlap = 0.0;
  std::vector<int32_t> labels;
};

}  // namespace

OfflineReport RunOfflineEval(const Corpus& corpus,
                             const std::vector<const Recommender*>& methods,
                             const OfflineEvalConfig& cfg) {
  if (cfg.n_values.empty()) throw ConfigError("eval needs at least one n");
  for (int n : cfg.n_values) {
    if (n < 1) throw ConfigError("eval n values must be >= 1");
  }
  if (cfg.complementarity_n < 1) throw ConfigError("complementarity n < 1");
  const Inventory& inv = *corpus.inventory;
  const std::vector<const AnnotatedQuery*> test = corpus.Test();
  if (test.empty()) throw PreconditionError("test split is empty");

  const size_t num_n = cfg.n_values.size();
  std::vector<QueryRow> rows(test.size());
  std::vector<std::vector<MethodResult>> results(
      test.size(), std::vector<MethodResult>(methods.size()));

  ParallelFor(test.size(), cfg.threads, [&](size_t i) {
    const AnnotatedQuery& q = *test[i];
    QueryRow& row = rows[i];
    row.text = q.text();
    row.num_potential = q.potential_intents().size();
    row.num_candidates = CandidateLabels(inv, q).size();
    for (int n : cfg.n_values) {
      const UpperBound ub = UpperBoundAtN(inv, q, n);
      row.upper_bound.push_back(ub.ratio);
      row.upper_bound_exact.push_back(ub.exact);
    }
    for (size_t m = 0; m < methods.size(); ++m) {
      MethodResult& r = results[i][m];
      for (int n : cfg.n_values) {
        const Trajectory tau = methods[m]->Recommend(q.text(), n);
        r.union_recall.push_back(RecallAtN(inv, q, tau, RecallVariant::kUnion));
        r.sum_recall.push_back(RecallAtN(inv, q, tau, RecallVariant::kSum));
      }
      const Trajectory tau =
          methods[m]->Recommend(q.text(), cfg.complementarity_n);
      r.diversity = Diversity(tau, inv, cfg.scheme);
      r.overlap = Overlap(tau, q.text(), inv, cfg.scheme);
      for (LabelId x : tau.labels()) r.labels.push_back(x.value());
    }
  });

  OfflineReport report;
  report.corpus_seed = corpus.seed;
  report.inventory_hash = inv.Hash();
  report.n_values = cfg.n_values;
  report.tokenizer = TokenizerSchemeName(cfg.scheme);
  report.upper_bound.assign(num_n, 0.0);
  for (const Recommender* method : methods) {
    MethodScores scores;
    scores.name = method->name();
    scores.union_recall.assign(num_n, 0.0);
    scores.sum_recall.assign(num_n, 0.0);
    report.methods.push_back(std::move(scores));
  }
  const double count = static_cast<double>(test.size());
  for (size_t i = 0; i < test.size(); ++i) {
    QueryRow& row = rows[i];
    bool inexact = false;
    for (size_t k = 0; k < num_n; ++k) {
      report.upper_bound[k] += row.upper_bound[k] / count;
      inexact = inexact || !row.upper_bound_exact[k];
    }
    if (inexact) ++report.inexact_upper_bounds;
    for (size_t m = 0; m < methods.size(); ++m) {
      MethodResult& r = results[i][m];
      MethodScores& scores = report.methods[m];
      for (size_t k = 0; k < num_n; ++k) {
        scores.union_recall[k] += r.union_recall[k] / count;
        scores.sum_recall[k] += r.sum_recall[k] / count;
      }
      scores.diversity += r.diversity / count;
      scores.overlap += r.overlap / count;
      row.union_recall.push_back(std::move(r.union_recall));
      row.labels.push_back(std::move(r.labels));
    }
  }
  report.queries = std::move(rows);
  return report;
}

}  // namespace clarify
