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

#ifndef CLARIFY_POLICY_CHECKPOINT_H_
#define CLARIFY_POLICY_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "clarify/policy/classifier.h"
#include "clarify/policy/params.h"
#include "clarify/policy/policy_model.h"
#include "json.hpp"

namespace clarify {

// Binary layout: 8-byte magic "CLRFYCKP", uint32 version, uint64 header
// length, UTF-8 JSON header, then each block listed in header["blocks"] as
// little-endian float32 values in column-major order.
inline constexpr uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  nlohmann::json header;
  std::vector<ParamBlock> blocks;

  std::string kind() const { return header.at("kind"); }
  std::string method() const { return header.at("method"); }
  uint64_t inventory_hash() const { return header.at("inventory_hash"); }
};

// Header fields common to every model; `extra` is stored verbatim.
struct CheckpointMeta {
  std::string method;  // rl, supervised, greedy, nst, untrained
  uint64_t inventory_hash = 0;
  nlohmann::json extra = nlohmann::json::object();
};

std::string EncodeCheckpoint(nlohmann::json header,
                             const std::vector<ParamBlock>& blocks);
// Throws ParseError on a truncated or foreign file.
Checkpoint DecodeCheckpoint(std::string_view bytes);

void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes);
std::string ReadFileBytes(const std::filesystem::path& path);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

std::string EncodePolicy(const PolicyModel& model, const CheckpointMeta& meta);
std::string EncodeClassifier(const Classifier& model,
                             const CheckpointMeta& meta);
void SavePolicy(const PolicyModel& model, const CheckpointMeta& meta,
                const std::filesystem::path& path);
void SaveClassifier(const Classifier& model, const CheckpointMeta& meta,
                    const std::filesystem::path& path);

// Throws ParseError if the checkpoint holds another kind of model or its
// blocks do not match the architecture in the header.
PolicyModel PolicyFromCheckpoint(const Checkpoint& ckpt);
Classifier ClassifierFromCheckpoint(const Checkpoint& ckpt);

// FNV-1a of the encoded bytes.
uint64_t PolicyHash(const PolicyModel& model, const CheckpointMeta& meta);

std::string HexHash(uint64_t hash);

}  // namespace clarify

#endif  // CLARIFY_POLICY_CHECKPOINT_H_
