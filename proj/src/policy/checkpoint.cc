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

#include "clarify/policy/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "clarify/common/errors.h"

namespace clarify {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'C', 'L', 'R', 'F', 'Y', 'C', 'K', 'P'};

template <typename T>
void PutLe(std::string& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  for (size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
  }
}

template <typename T>
T GetLe(std::string_view bytes, size_t& pos) {
  if (pos + sizeof(T) > bytes.size()) {
    throw ParseError("checkpoint truncated at byte " + std::to_string(pos));
  }
  T value = 0;
  for (size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<uint8_t>(bytes[pos + i])) << (8 * i);
  }
  pos += sizeof(T);
  return value;
}

json HeaderFor(const char* kind, const ModelConfig& cfg,
               const Vocabulary& vocab, int num_outputs,
               const CheckpointMeta& meta) {
  return {{"kind", kind},
          {"method", meta.method},
          {"model", cfg.ToJson()},
          {"vocab", vocab.tokens()},
          {"num_outputs", num_outputs},
          {"seed", cfg.seed},
          {"inventory_hash", meta.inventory_hash},
          {"extra", meta.extra}};
}

void CopyBlocks(const Checkpoint& ckpt, std::vector<ParamBlock>& dst) {
  if (ckpt.blocks.size() != dst.size()) {
    throw ParseError("checkpoint has " + std::to_string(ckpt.blocks.size()) +
                     " blocks, architecture expects " +
                     std::to_string(dst.size()));
  }
  for (size_t i = 0; i < dst.size(); ++i) {
    const ParamBlock& src = ckpt.blocks[i];
    if (src.name != dst[i].name || src.value.rows() != dst[i].value.rows() ||
        src.value.cols() != dst[i].value.cols()) {
      throw ParseError("checkpoint block '" + src.name +
                       "' does not match architecture block '" + dst[i].name +
                       "'");
    }
    dst[i].value = src.value;
  }
}

Vocabulary VocabFrom(const json& header) {
  std::vector<std::string> tokens = header.at("vocab");
  if (tokens.empty() || tokens.front() != "<unk>") {
    throw ParseError("checkpoint vocabulary must start with <unk>");
  }
  tokens.erase(tokens.begin());
  return Vocabulary(tokens);
}

}  // namespace

std::string EncodeCheckpoint(json header,
                             const std::vector<ParamBlock>& blocks) {
  json shapes = json::array();
  for (const ParamBlock& b : blocks) {
    shapes.push_back({{"name", b.name}, {"rows", b.value.rows()},
                      {"cols", b.value.cols()}});
  }
  header["blocks"] = shapes;
  header["version"] = kCheckpointVersion;
  const std::string text = header.dump();

  std::string out(kMagic, sizeof(kMagic));
  PutLe<uint32_t>(out, kCheckpointVersion);
  PutLe<uint64_t>(out, text.size());
  out += text;
  for (const ParamBlock& b : blocks) {
    const Eigen::Index n = b.value.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      const float f = static_cast<float>(b.value.data()[i]);
      PutLe<uint32_t>(out, std::bit_cast<uint32_t>(f));
    }
  }
  return out;
}

Checkpoint DecodeCheckpoint(std::string_view bytes) {
  if (bytes.size() < sizeof(kMagic) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("not a checkpoint file (bad magic)");
  }
  size_t pos = sizeof(kMagic);
  const uint32_t version = GetLe<uint32_t>(bytes, pos);
  if (version != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version " +
                     std::to_string(version));
  }
  const uint64_t header_len = GetLe<uint64_t>(bytes, pos);
  if (pos + header_len > bytes.size()) {
    throw ParseError("checkpoint header truncated");
  }
  Checkpoint ckpt;
  try {
    ckpt.header = json::parse(bytes.substr(pos, header_len));
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint header: ") + e.what());
  }
  pos += header_len;
  for (const json& shape : ckpt.header.at("blocks")) {
    const Eigen::Index rows = shape.at("rows");
    const Eigen::Index cols = shape.at("cols");
    ParamBlock& b = ckpt.blocks.emplace_back(shape.at("name"), rows, cols);
    for (Eigen::Index i = 0; i < rows * cols; ++i) {
      b.value.data()[i] =
          static_cast<double>(std::bit_cast<float>(GetLe<uint32_t>(bytes, pos)));
    }
  }
  if (pos != bytes.size()) {
    throw ParseError("checkpoint has " + std::to_string(bytes.size() - pos) +
                     " trailing bytes");
  }
  return ckpt;
}

void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  try {
    return DecodeCheckpoint(ReadFileBytes(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string EncodePolicy(const PolicyModel& model, const CheckpointMeta& meta) {
  return EncodeCheckpoint(HeaderFor("policy", model.config(), model.vocab(),
                                    model.num_labels(), meta),
                          model.blocks());
}

std::string EncodeClassifier(const Classifier& model,
                             const CheckpointMeta& meta) {
  return EncodeCheckpoint(HeaderFor("classifier", model.config(),
                                    model.vocab(), model.num_outputs(), meta),
                          model.blocks());
}

void SavePolicy(const PolicyModel& model, const CheckpointMeta& meta,
                const std::filesystem::path& path) {
  WriteFileBytes(path, EncodePolicy(model, meta));
}

void SaveClassifier(const Classifier& model, const CheckpointMeta& meta,
                    const std::filesystem::path& path) {
  WriteFileBytes(path, EncodeClassifier(model, meta));
}

PolicyModel PolicyFromCheckpoint(const Checkpoint& ckpt) {
  if (ckpt.kind() != "policy") {
    throw ParseError("checkpoint holds a " + ckpt.kind() + ", not a policy");
  }
  PolicyModel model(ModelConfig::FromJson(ckpt.header.at("model")),
                    VocabFrom(ckpt.header), ckpt.header.at("num_outputs"));
  CopyBlocks(ckpt, model.blocks());
  return model;
}

Classifier ClassifierFromCheckpoint(const Checkpoint& ckpt) {
  if (ckpt.kind() != "classifier") {
    throw ParseError("checkpoint holds a " + ckpt.kind() +
                     ", not a classifier");
  }
  Classifier model(ModelConfig::FromJson(ckpt.header.at("model")),
                   VocabFrom(ckpt.header), ckpt.header.at("num_outputs"));
  CopyBlocks(ckpt, model.blocks());
  return model;
}

uint64_t PolicyHash(const PolicyModel& model, const CheckpointMeta& meta) {
  const std::string bytes = EncodePolicy(model, meta);
  return Fnv1a({reinterpret_cast<const uint8_t*>(bytes.data()), bytes.size()});
}

std::string HexHash(uint64_t hash) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << hash;
  return os.str();
}

}  // namespace clarify
