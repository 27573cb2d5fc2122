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

#ifndef CLARIFY_COMMON_RANDOM_H_
#define CLARIFY_COMMON_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace clarify {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent child seeds.
uint64_t MixSeed(uint64_t seed, uint64_t stream);

inline Rng MakeRng(uint64_t seed, uint64_t stream = 0) {
  return Rng(MixSeed(seed, stream));
}

// Uniform integer in [0, n).
size_t UniformIndex(Rng& rng, size_t n);

double UniformUnit(Rng& rng);

// Index drawn proportionally to non-negative weights. Falls back to a uniform
// draw when every weight is zero.
size_t SampleWeighted(Rng& rng, std::span<const double> weights);

// Symmetric Dirichlet(alpha) sample of the given dimension.
std::vector<double> SampleDirichlet(Rng& rng, size_t dim, double alpha);

template <typename T>
void Shuffle(std::vector<T>& items, Rng& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[UniformIndex(rng, i)]);
  }
}

// 64-bit FNV-1a over raw bytes.
uint64_t Fnv1a(std::span<const uint8_t> bytes, uint64_t seed = 14695981039346656037ull);

}  // namespace clarify

#endif  // CLARIFY_COMMON_RANDOM_H_
