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

#ifndef CLARIFY_POLICY_ENCODER_H_
#define CLARIFY_POLICY_ENCODER_H_

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "clarify/common/random.h"
#include "clarify/policy/params.h"
#include "json.hpp"

namespace clarify {

enum class EncoderKind {
  kMlp,        // mean-pooled token embeddings + 2-layer perceptron
  kAttention,  // one self-attention layer over tokens before pooling
};

struct ModelConfig {
  int dim = 64;
  int heads = 2;
  // Decoder positions; later steps reuse the last position embedding.
  int max_positions = 8;
  EncoderKind encoder = EncoderKind::kMlp;
  double embedding_std = 0.3;
  // Zero output projection makes an untrained model uniform.
  bool zero_output_init = true;
  uint64_t seed = 0;

  void Validate() const;
  nlohmann::json ToJson() const;
  static ModelConfig FromJson(const nlohmann::json& j);
};

// Multi-head scaled dot-product attention of a single query vector over the
// columns of a memory matrix. Returns the concatenated head outputs; the
// output projection is left to the caller.
class Attention {
 public:
  struct Cache {
    Eigen::VectorXd query_in;
    Eigen::MatrixXd memory;
    Eigen::VectorXd q;
    Eigen::MatrixXd k;
    Eigen::MatrixXd v;
    std::vector<Eigen::VectorXd> weights;  // per head, over memory columns
  };

  Attention() = default;
  Attention(int dim, int heads) : dim_(dim), heads_(heads) {}

  Eigen::VectorXd Forward(const Eigen::MatrixXd& wq, const Eigen::MatrixXd& wk,
                          const Eigen::MatrixXd& wv,
                          const Eigen::VectorXd& query_in,
                          const Eigen::MatrixXd& memory, Cache* cache) const;

  // Accumulates parameter gradients; adds input gradients to *dquery and
  // *dmemory.
  void Backward(const Eigen::MatrixXd& wq, const Eigen::MatrixXd& wk,
                const Eigen::MatrixXd& wv, const Cache& cache,
                const Eigen::VectorXd& dout, Eigen::MatrixXd* dwq,
                Eigen::MatrixXd* dwk, Eigen::MatrixXd* dwv,
                Eigen::VectorXd* dquery, Eigen::MatrixXd* dmemory) const;

 private:
  int dim_ = 0;
  int heads_ = 1;
};

// Maps token ids to the d-dim query vector. Its parameter blocks live in the
// owning model's block vector, starting at the offset given at construction.
class QueryEncoder {
 public:
  struct Cache {
    std::vector<int> ids;
    Eigen::MatrixXd tokens;  // d x n embeddings
    std::vector<Attention::Cache> attention;
    Eigen::MatrixXd attended;  // d x n after the residual self-attention
    Eigen::VectorXd pooled;
    Eigen::VectorXd hidden;
    Eigen::VectorXd out;
  };

  QueryEncoder() = default;
  // Appends the encoder's blocks to `blocks` and initializes them.
  QueryEncoder(const ModelConfig& cfg, size_t vocab_size,
               std::vector<ParamBlock>& blocks, Rng& rng);

  Eigen::VectorXd Forward(const std::vector<ParamBlock>& blocks,
                          std::span<const int> ids, Cache* cache) const;
  void Backward(std::vector<ParamBlock>& blocks, const Cache& cache,
                const Eigen::VectorXd& dout) const;

 private:
  enum Slot { kEmbedding, kW1, kB1, kW2, kB2, kWq, kWk, kWv, kWo };
  size_t at(Slot s) const { return first_ + static_cast<size_t>(s); }

  EncoderKind kind_ = EncoderKind::kMlp;
  Attention attention_;
  size_t first_ = 0;
};

// Appends a zero block; initializes it N(0, stddev) unless stddev is 0.
ParamBlock& AddBlock(std::vector<ParamBlock>& blocks, const std::string& name,
                     Eigen::Index rows, Eigen::Index cols, double stddev,
                     Rng& rng);

BlockList BlockPointers(std::vector<ParamBlock>& blocks);

}  // namespace clarify

#endif  // CLARIFY_POLICY_ENCODER_H_
