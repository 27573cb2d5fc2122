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

#ifndef CLARIFY_TESTS_SUPPORT_FIXTURES_H_
#define CLARIFY_TESTS_SUPPORT_FIXTURES_H_

#include <memory>
#include <string>
#include <vector>

#include "clarify/common/random.h"
#include "clarify/inventory/inventory.h"
#include "clarify/reward/reward.h"

namespace clarify::testing {

// Fixture F1. Intents:
//   s0 "apply credit card", s1 "apply loan", s2 "apply QR code",
//   s3 "cancel credit card"
// Labels:
//   x0 "apply" -> {s0,s1,s2}, x1 "credit card" -> {s0,s3}, x2 "loan" -> {s1},
//   x3 "QR code" -> {s2}, x4 "cancel" -> {s3}
std::shared_ptr<const Inventory> F1Inventory();
// "how to apply" with potential intents {s0, s1, s2}.
AnnotatedQuery F1Query();

inline constexpr LabelId kApply{0};
inline constexpr LabelId kCreditCard{1};
inline constexpr LabelId kLoan{2};
inline constexpr LabelId kQrCode{3};
inline constexpr LabelId kCancel{4};

// Corpus over F1 holding the one query in both splits.
Corpus F1Corpus();

struct RandomInventoryOptions {
  int min_intents = 3;
  int max_intents = 16;
  int min_labels = 2;
  int max_labels = 12;
};

// Random inventory: intent texts and label phrases drawn from a small word
// list, every label mapping to a non-empty random subset of intents.
std::shared_ptr<const Inventory> RandomInventory(
    Rng& rng, const RandomInventoryOptions& opts = {});

// Random non-empty potential-intent set; the text reuses inventory words.
AnnotatedQuery RandomQuery(Rng& rng, const Inventory& inv,
                           Split split = Split::kTrain);

// Distinct random labels, length in [0, max_length].
Trajectory RandomTrajectory(Rng& rng, const Inventory& inv, int max_length);

// Random corpus over a random inventory; both splits non-empty.
Corpus RandomCorpus(Rng& rng, int num_queries,
                    const RandomInventoryOptions& opts = {});

// Instance with at most `max_candidates` candidate labels (and at least
// `min_candidates`) for the query.
struct SearchInstance {
  std::shared_ptr<const Inventory> inv;
  AnnotatedQuery query;
};
SearchInstance RandomSearchInstance(Rng& rng, int min_candidates,
                                    int max_candidates);

}  // namespace clarify::testing

#endif  // CLARIFY_TESTS_SUPPORT_FIXTURES_H_
