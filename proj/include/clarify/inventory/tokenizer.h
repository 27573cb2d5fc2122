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

#ifndef CLARIFY_INVENTORY_TOKENIZER_H_
#define CLARIFY_INVENTORY_TOKENIZER_H_

#include <string>
#include <string_view>
#include <vector>

namespace clarify {

enum class TokenizerScheme {
  // Lowercased words; ASCII punctuation acts as a separator.
  kWhitespace,
  // Lowercased adjacent-character pairs within each word. One-character words
  // become a single token.
  kCharBigram,
};

TokenizerScheme ParseTokenizerScheme(std::string_view name);
const char* TokenizerSchemeName(TokenizerScheme scheme);

std::vector<std::string> Tokenize(std::string_view text,
                                  TokenizerScheme scheme);

std::string JoinTokens(const std::vector<std::string>& tokens);

}  // namespace clarify

#endif  // CLARIFY_INVENTORY_TOKENIZER_H_
