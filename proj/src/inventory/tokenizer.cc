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

#include "clarify/inventory/tokenizer.h"

#include <cctype>

#include "clarify/common/errors.h"

namespace clarify {

TokenizerScheme ParseTokenizerScheme(std::string_view name) {
  if (name == "whitespace") return TokenizerScheme::kWhitespace;
  if (name == "char-bigram") return TokenizerScheme::kCharBigram;
  throw ConfigError("unknown tokenizer '" + std::string(name) + "'");
}

const char* TokenizerSchemeName(TokenizerScheme scheme) {
  return scheme == TokenizerScheme::kWhitespace ? "whitespace" : "char-bigram";
}

namespace {

std::vector<std::string> SplitWords(std::string_view text, bool strip_punct) {
  std::vector<std::string> words;
  std::string current;
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    const bool separator =
        std::isspace(c) || (strip_punct && std::ispunct(c));
    if (separator) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view text,
                                  TokenizerScheme scheme) {
  if (scheme == TokenizerScheme::kWhitespace) {
    return SplitWords(text, /*strip_punct=*/true);
  }
  std::vector<std::string> tokens;
  for (const std::string& word : SplitWords(text, /*strip_punct=*/false)) {
    if (word.size() == 1) {
      tokens.push_back(word);
      continue;
    }
    for (size_t i = 0; i + 1 < word.size(); ++i) {
      tokens.push_back(word.substr(i, 2));
    }
  }
  return tokens;
}

std::string JoinTokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const std::string& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace clarify
