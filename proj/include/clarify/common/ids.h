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

#ifndef CLARIFY_COMMON_IDS_H_
#define CLARIFY_COMMON_IDS_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>

namespace clarify {

// Dense integer identifier tagged by the kind of object it names. Ids within
// one inventory are contiguous from 0, so value() doubles as a vector index.
template <typename Tag>
class StrongId {
 public:
  constexpr StrongId() = default;
  constexpr explicit StrongId(int32_t value) : value_(value) {}

  constexpr int32_t value() const { return value_; }
  constexpr size_t index() const { return static_cast<size_t>(value_); }

  friend constexpr auto operator<=>(StrongId, StrongId) = default;

  friend std::ostream& operator<<(std::ostream& os, StrongId id) {
    return os << id.value_;
  }

 private:
  int32_t value_ = -1;
};

using IntentId = StrongId<struct IntentTag>;
using LabelId = StrongId<struct LabelTag>;

}  // namespace clarify

template <typename Tag>
struct std::hash<clarify::StrongId<Tag>> {
  size_t operator()(clarify::StrongId<Tag> id) const noexcept {
    return std::hash<int32_t>{}(id.value());
  }
};

#endif  // CLARIFY_COMMON_IDS_H_
