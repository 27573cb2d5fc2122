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

#include "clarify/eval/metrics.h"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <set>
#include <unordered_map>
#include <vector>

#include "clarify/common/errors.h"

namespace clarify {

RecallVariant ParseRecallVariant(const std::string& name) {
  if (name == "union") return RecallVariant::kUnion;
  if (name == "sum") return RecallVariant::kSum;
  throw ConfigError("unknown recall variant '" + name + "'");
}

const char* RecallVariantName(RecallVariant variant) {
  return variant == RecallVariant::kUnion ? "union" : "sum";
}

double RecallAtN(const Inventory& inv, const AnnotatedQuery& query,
                 const Trajectory& tau, RecallVariant variant) {
  const IntentSet& potential = query.potential_intents();
  const double size = static_cast<double>(potential.size());
  if (variant == RecallVariant::kUnion) {
    return static_cast<double>(CoveredSet(inv, query, tau).size()) / size;
  }
  double total = 0.0;
  for (LabelId x : tau.labels()) {
    total += static_cast<double>(Intersect(inv.IntentsOf(x), potential).size());
  }
  return total / size;
}

namespace {

using Bits = std::vector<uint64_t>;

int PopCount(const Bits& bits) {
  int n = 0;
  for (uint64_t w : bits) n += std::popcount(w);
  return n;
}

int UnionGain(const Bits& covered, const Bits& add) {
  int n = 0;
  for (size_t i = 0; i < covered.size(); ++i) {
    n += std::popcount(add[i] & ~covered[i]);
  }
  return n;
}

class BranchAndBound {
 public:
  BranchAndBound(std::vector<Bits> covers, int total, int n)
      : covers_(std::move(covers)), total_(total), n_(n) {
    std::sort(covers_.begin(), covers_.end(),
              [](const Bits& a, const Bits& b) {
                return PopCount(a) > PopCount(b);
              });
    sizes_.reserve(covers_.size());
    for (const Bits& c : covers_) sizes_.push_back(PopCount(c));
  }

  int Solve() {
    const size_t words = covers_.empty() ? 0 : covers_.front().size();
    Bits covered(words, 0);
    Search(0, 0, covered, 0);
    return best_;
  }

 private:
  void Search(size_t i, int picked, const Bits& covered, int count) {
    best_ = std::max(best_, count);
    if (best_ == total_ || picked == n_ || i == covers_.size()) return;
    // Sizes are sorted, so the next picks can add at most this much.
    int bound = count;
    for (size_t k = i; k < covers_.size() && k < i + (n_ - picked); ++k) {
      bound += sizes_[k];
    }
    if (std::min(bound, total_) <= best_) return;

    const int gain = UnionGain(covered, covers_[i]);
    if (gain > 0) {
      Bits next = covered;
      for (size_t w = 0; w < next.size(); ++w) next[w] |= covers_[i][w];
      Search(i + 1, picked + 1, next, count + gain);
    }
    Search(i + 1, picked, covered, count);
  }

  std::vector<Bits> covers_;
  std::vector<int> sizes_;
  int total_;
  int n_;
  int best_ = 0;
};

}  // namespace

UpperBound UpperBoundAtN(const Inventory& inv, const AnnotatedQuery& query,
                         int n) {
  if (n < 0) throw PreconditionError("upper bound needs n >= 0");
  const IntentSet& potential = query.potential_intents();
  const size_t words = (potential.size() + 63) / 64;
  std::unordered_map<int32_t, size_t> local;
  for (size_t i = 0; i < potential.size(); ++i) {
    local.emplace(potential[i].value(), i);
  }
  std::vector<Bits> covers;
  for (LabelId x : CandidateLabels(inv, query)) {
    Bits bits(words, 0);
    for (IntentId s : inv.IntentsOf(x)) {
      auto it = local.find(s.value());
      if (it != local.end()) bits[it->second / 64] |= 1ull << (it->second % 64);
    }
    covers.push_back(std::move(bits));
  }

  UpperBound out;
  const int total = static_cast<int>(potential.size());
  if (covers.size() <= kMaxExactUpperBoundCandidates) {
    out.covered = BranchAndBound(std::move(covers), total, n).Solve();
  } else {
    out.exact = false;
    Bits covered(words, 0);
    std::vector<uint8_t> used(covers.size(), 0);
    for (int t = 0; t < n; ++t) {
      int best = -1;
      int best_gain = 0;
      for (size_t i = 0; i < covers.size(); ++i) {
        if (used[i]) continue;
        const int gain = UnionGain(covered, covers[i]);
        if (gain > best_gain) {
          best = static_cast<int>(i);
          best_gain = gain;
        }
      }
      if (best < 0) break;
      used[best] = 1;
      for (size_t w = 0; w < words; ++w) covered[w] |= covers[best][w];
      out.covered += best_gain;
    }
  }
  out.ratio = static_cast<double>(out.covered) / static_cast<double>(total);
  return out;
}

double Diversity(const Trajectory& tau, const Inventory& inv,
                 TokenizerScheme scheme) {
  if (tau.empty()) throw PreconditionError("diversity of an empty trajectory");
  std::set<std::string> distinct;
  size_t total = 0;
  for (LabelId x : tau.labels()) {
    for (std::string& t : Tokenize(inv.label(x).phrase, scheme)) {
      distinct.insert(std::move(t));
      ++total;
    }
  }
  if (total == 0) return 1.0;
  return static_cast<double>(distinct.size()) / static_cast<double>(total);
}

double Overlap(const Trajectory& tau, std::string_view query,
               const Inventory& inv, TokenizerScheme scheme) {
  if (tau.empty()) throw PreconditionError("overlap of an empty trajectory");
  std::set<std::string> query_tokens;
  for (std::string& t : Tokenize(query, scheme)) {
    query_tokens.insert(std::move(t));
  }
  // C(t): occurrences across all label phrases of the trajectory.
  std::map<std::string, size_t> counts;
  std::vector<std::set<std::string>> label_tokens;
  for (LabelId x : tau.labels()) {
    std::set<std::string> distinct;
    for (std::string& t : Tokenize(inv.label(x).phrase, scheme)) {
      ++counts[t];
      distinct.insert(std::move(t));
    }
    label_tokens.push_back(std::move(distinct));
  }
  double shared = 0.0;
  double total = 0.0;
  for (const std::set<std::string>& tokens : label_tokens) {
    for (const std::string& t : tokens) {
      const double c = static_cast<double>(counts[t]);
      total += c;
      if (query_tokens.contains(t)) shared += c;
    }
  }
  return total == 0.0 ? 0.0 : shared / total;
}

}  // namespace clarify
