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

#ifndef CLARIFY_EVAL_METRICS_H_
#define CLARIFY_EVAL_METRICS_H_

#include <string>
#include <string_view>

#include "clarify/inventory/inventory.h"
#include "clarify/inventory/tokenizer.h"
#include "clarify/reward/reward.h"

namespace clarify {

enum class RecallVariant {
  kUnion,  // |S(tau)| / |Q(q)|
  kSum,    // sum over labels of |M(x) & Q(q)| / |Q(q)|; may exceed 1
};

RecallVariant ParseRecallVariant(const std::string& name);
const char* RecallVariantName(RecallVariant variant);

double RecallAtN(const Inventory& inv, const AnnotatedQuery& query,
                 const Trajectory& tau, RecallVariant variant);

struct UpperBound {
  double ratio = 0.0;
  int covered = 0;
  bool exact = true;
};

// Candidate sets up to this size get exact branch-and-bound.
inline constexpr size_t kMaxExactUpperBoundCandidates = 20;

// Best union coverage of Q(q) reachable with n labels.
UpperBound UpperBoundAtN(const Inventory& inv, const AnnotatedQuery& query,
                         int n);

// Distinct tokens over total tokens across the label phrases.
double Diversity(const Trajectory& tau, const Inventory& inv,
                 TokenizerScheme scheme);

// Share of label-phrase tokens that also occur in the query.
double Overlap(const Trajectory& tau, std::string_view query,
               const Inventory& inv, TokenizerScheme scheme);

}  // namespace clarify

#endif  // CLARIFY_EVAL_METRICS_H_
