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

#include "clarify/reward/evaluator.h"

#include <bit>
#include <cmath>

#include "clarify/common/errors.h"

namespace clarify {

QueryEvaluator::QueryEvaluator(const Inventory& inv,
                               const AnnotatedQuery& query,
                               const RewardConfig& cfg)
    : cfg_(cfg),
      num_potential_(query.potential_intents().size()),
      words_((num_potential_ + 63) / 64),
      candidates_(CandidateLabels(inv, query)),
      slot_(inv.num_labels(), -1) {
  const IntentSet& potential = query.potential_intents();
  std::vector<int32_t> local(inv.num_intents(), -1);
  for (size_t i = 0; i < potential.size(); ++i) {
    local[potential[i].index()] = static_cast<int32_t>(i);
  }
  covers_.assign(candidates_.size() * words_, 0);
  cover_sizes_.assign(candidates_.size(), 0);
  for (size_t c = 0; c < candidates_.size(); ++c) {
    slot_[candidates_[c].index()] = static_cast<int32_t>(c);
    for (IntentId s : inv.IntentsOf(candidates_[c])) {
      const int32_t k = local[s.index()];
      if (k < 0) continue;
      covers_[c * words_ + k / 64] |= uint64_t{1} << (k % 64);
      ++cover_sizes_[c];
    }
  }
  log_table_.resize(num_potential_ + 1, 0.0);
  for (size_t k = 2; k <= num_potential_; ++k) {
    log_table_[k] = std::log(static_cast<double>(k));
  }
  base_entropy_ = log_table_[num_potential_];
}

const uint64_t* QueryEvaluator::CoverOf(LabelId x) const {
  if (x.value() < 0 || x.index() >= slot_.size()) {
    throw PreconditionError("unknown label id " + std::to_string(x.value()));
  }
  const int32_t c = slot_[x.index()];
  return c < 0 ? nullptr : covers_.data() + static_cast<size_t>(c) * words_;
}

int QueryEvaluator::CoverSize(LabelId x) const {
  const int32_t c = slot_.at(x.index());
  return c < 0 ? 0 : cover_sizes_[c];
}

int QueryEvaluator::CoveredCount(std::span<const LabelId> labels) const {
  std::vector<uint64_t> covered(words_, 0);
  for (LabelId x : labels) {
    const uint64_t* cover = CoverOf(x);
    if (cover == nullptr) continue;
    for (size_t w = 0; w < words_; ++w) covered[w] |= cover[w];
  }
  int count = 0;
  for (uint64_t w : covered) count += std::popcount(w);
  return count;
}

double QueryEvaluator::Reward(std::span<const LabelId> labels) const {
  constexpr size_t kInline = 8;
  uint64_t inline_buf[kInline] = {};
  std::vector<uint64_t> heap_buf;
  uint64_t* covered = inline_buf;
  if (words_ > kInline) {
    heap_buf.assign(words_, 0);
    covered = heap_buf.data();
  }

  // sum_t |D_t| ln |D_t|, divided by |S| at the end.
  double weighted = 0.0;
  int total = 0;
  for (LabelId x : labels) {
    const uint64_t* cover = CoverOf(x);
    if (cover == nullptr) continue;
    int marginal = 0;
    for (size_t w = 0; w < words_; ++w) {
      const uint64_t fresh = cover[w] & ~covered[w];
      marginal += std::popcount(fresh);
      covered[w] |= fresh;
    }
    total += marginal;
    weighted += marginal * log_table_[marginal];
  }
  if (total > 0) weighted /= total;
  const double gain = cfg_.convention == GainConvention::kPaper
                          ? weighted - base_entropy_
                          : base_entropy_ - weighted;
  const double recall =
      static_cast<double>(total) / static_cast<double>(num_potential_);
  return recall + cfg_.beta * gain;
}

}  // namespace clarify
