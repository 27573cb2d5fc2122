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

#ifndef CLARIFY_COMMON_INTENT_SET_H_
#define CLARIFY_COMMON_INTENT_SET_H_

#include <algorithm>
#include <iterator>
#include <vector>

#include "clarify/common/ids.h"

namespace clarify {

// Sorted, duplicate-free set of intents. Small enough in practice that a
// flat vector beats node-based sets.
using IntentSet = std::vector<IntentId>;

inline void Normalize(IntentSet& set) {
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
}

inline IntentSet Intersect(const IntentSet& a, const IntentSet& b) {
  IntentSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

inline IntentSet Union(const IntentSet& a, const IntentSet& b) {
  IntentSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

inline IntentSet Minus(const IntentSet& a, const IntentSet& b) {
  IntentSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

inline bool Contains(const IntentSet& set, IntentId id) {
  return std::binary_search(set.begin(), set.end(), id);
}

inline bool Intersects(const IntentSet& a, const IntentSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      return true;
    }
  }
  return false;
}

}  // namespace clarify

#endif  // CLARIFY_COMMON_INTENT_SET_H_
