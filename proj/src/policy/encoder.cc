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

#include "clarify/policy/encoder.h"

#include <cmath>

#include "clarify/common/errors.h"

namespace clarify {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

void ModelConfig::Validate() const {
  if (dim < 1) throw ConfigError("model dim must be >= 1");
  if (heads < 1 || dim % heads != 0) {
    throw ConfigError("model heads must divide dim");
  }
  if (max_positions < 1) throw ConfigError("max_positions must be >= 1");
  if (!(embedding_std > 0.0)) throw ConfigError("embedding_std must be > 0");
}

json ModelConfig::ToJson() const {
  return {{"dim", dim},
          {"heads", heads},
          {"max_positions", max_positions},
          {"encoder", encoder == EncoderKind::kMlp ? "mlp" : "attention"},
          {"embedding_std", embedding_std},
          {"zero_output_init", zero_output_init},
          {"seed", seed}};
}

ModelConfig ModelConfig::FromJson(const json& j) {
  ModelConfig c;
  c.dim = j.value("dim", c.dim);
  c.heads = j.value("heads", c.heads);
  c.max_positions = j.value("max_positions", c.max_positions);
  const std::string enc = j.value("encoder", std::string("mlp"));
  if (enc == "mlp") {
    c.encoder = EncoderKind::kMlp;
  } else if (enc == "attention") {
    c.encoder = EncoderKind::kAttention;
  } else {
    throw ConfigError("unknown encoder '" + enc + "'");
  }
  c.embedding_std = j.value("embedding_std", c.embedding_std);
  c.zero_output_init = j.value("zero_output_init", c.zero_output_init);
  c.seed = j.value("seed", c.seed);
  c.Validate();
  return c;
}

ParamBlock& AddBlock(std::vector<ParamBlock>& blocks, const std::string& name,
                     Eigen::Index rows, Eigen::Index cols, double stddev,
                     Rng& rng) {
  blocks.emplace_back(name, rows, cols);
  if (stddev > 0.0) InitNormal(blocks.back(), stddev, rng);
  return blocks.back();
}

BlockList BlockPointers(std::vector<ParamBlock>& blocks) {
  BlockList out;
  for (ParamBlock& b : blocks) out.push_back(&b);
  return out;
}

VectorXd Attention::Forward(const MatrixXd& wq, const MatrixXd& wk,
                            const MatrixXd& wv, const VectorXd& query_in,
                            const MatrixXd& memory, Cache* cache) const {
  const int dk = dim_ / heads_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  cache->query_in = query_in;
  cache->memory = memory;
  cache->q = wq * query_in;
  cache->k = wk * memory;
  cache->v = wv * memory;
  cache->weights.resize(heads_);
  VectorXd out(dim_);
  for (int h = 0; h < heads_; ++h) {
    const auto kh = cache->k.middleRows(h * dk, dk);
    const auto vh = cache->v.middleRows(h * dk, dk);
    VectorXd scores = scale * (kh.transpose() * cache->q.segment(h * dk, dk));
    scores.array() -= scores.maxCoeff();
    VectorXd w = scores.array().exp();
    w /= w.sum();
    out.segment(h * dk, dk) = vh * w;
    cache->weights[h] = std::move(w);
  }
  return out;
}

void Attention::Backward(const MatrixXd& wq, const MatrixXd& wk,
                         const MatrixXd& wv, const Cache& cache,
                         const VectorXd& dout, MatrixXd* dwq, MatrixXd* dwk,
                         MatrixXd* dwv, VectorXd* dquery,
                         MatrixXd* dmemory) const {
  const int dk = dim_ / heads_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  const Eigen::Index n = cache.memory.cols();
  VectorXd dq(dim_);
  MatrixXd dk_all(dim_, n);
  MatrixXd dv_all(dim_, n);
  for (int h = 0; h < heads_; ++h) {
    const VectorXd& w = cache.weights[h];
    const auto douth = dout.segment(h * dk, dk);
    dv_all.middleRows(h * dk, dk) = douth * w.transpose();
    const VectorXd dw = cache.v.middleRows(h * dk, dk).transpose() * douth;
    const VectorXd dscores =
        scale * (w.array() * (dw.array() - w.dot(dw))).matrix();
    dq.segment(h * dk, dk) = cache.k.middleRows(h * dk, dk) * dscores;
    dk_all.middleRows(h * dk, dk) =
        cache.q.segment(h * dk, dk) * dscores.transpose();
  }
  *dwq += dq * cache.query_in.transpose();
  *dwk += dk_all * cache.memory.transpose();
  *dwv += dv_all * cache.memory.transpose();
  *dquery += wq.transpose() * dq;
  *dmemory += wk.transpose() * dk_all + wv.transpose() * dv_all;
}

QueryEncoder::QueryEncoder(const ModelConfig& cfg, size_t vocab_size,
                           std::vector<ParamBlock>& blocks, Rng& rng)
    : kind_(cfg.encoder),
      attention_(cfg.dim, cfg.heads),
      first_(blocks.size()) {
  const Eigen::Index d = cfg.dim;
  const double w_std = 1.0 / std::sqrt(static_cast<double>(d));
  AddBlock(blocks, "encoder.token_embedding", d,
           static_cast<Eigen::Index>(vocab_size), cfg.embedding_std, rng);
  AddBlock(blocks, "encoder.w1", d, d, w_std, rng);
  AddBlock(blocks, "encoder.b1", d, 1, 0.0, rng);
  AddBlock(blocks, "encoder.w2", d, d, w_std, rng);
  AddBlock(blocks, "encoder.b2", d, 1, 0.0, rng);
  if (kind_ == EncoderKind::kAttention) {
    AddBlock(blocks, "encoder.attn_wq", d, d, w_std, rng);
    AddBlock(blocks, "encoder.attn_wk", d, d, w_std, rng);
    AddBlock(blocks, "encoder.attn_wv", d, d, w_std, rng);
    AddBlock(blocks, "encoder.attn_wo", d, d, w_std, rng);
  }
}

VectorXd QueryEncoder::Forward(const std::vector<ParamBlock>& blocks,
                               std::span<const int> ids, Cache* cache) const {
  const MatrixXd& emb = blocks[at(kEmbedding)].value;
  const Eigen::Index d = emb.rows();
  const Eigen::Index n = static_cast<Eigen::Index>(ids.size());
  cache->ids.assign(ids.begin(), ids.end());
  cache->tokens.resize(d, n);
  for (Eigen::Index i = 0; i < n; ++i) cache->tokens.col(i) = emb.col(ids[i]);

  cache->attended = cache->tokens;
  if (kind_ == EncoderKind::kAttention && n > 0) {
    cache->attention.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const VectorXd heads = attention_.Forward(
          blocks[at(kWq)].value, blocks[at(kWk)].value, blocks[at(kWv)].value,
          cache->tokens.col(i), cache->tokens, &cache->attention[i]);
      cache->attended.col(i) += blocks[at(kWo)].value * heads;
    }
  }
  cache->pooled = n > 0 ? VectorXd(cache->attended.rowwise().mean())
                        : VectorXd::Zero(d);
  cache->hidden =
      (blocks[at(kW1)].value * cache->pooled + blocks[at(kB1)].value)
          .array()
          .tanh();
  cache->out =
      (blocks[at(kW2)].value * cache->hidden + blocks[at(kB2)].value)
          .array()
          .tanh();
  return cache->out;
}

void QueryEncoder::Backward(std::vector<ParamBlock>& blocks,
                            const Cache& cache, const VectorXd& dout) const {
  const VectorXd da2 =
      dout.array() * (1.0 - cache.out.array().square());
  blocks[at(kW2)].grad += da2 * cache.hidden.transpose();
  blocks[at(kB2)].grad += da2;
  const VectorXd dhidden = blocks[at(kW2)].value.transpose() * da2;
  const VectorXd da1 =
      dhidden.array() * (1.0 - cache.hidden.array().square());
  blocks[at(kW1)].grad += da1 * cache.pooled.transpose();
  blocks[at(kB1)].grad += da1;

  const Eigen::Index n = static_cast<Eigen::Index>(cache.ids.size());
  if (n == 0) return;
  const VectorXd dpooled =
      blocks[at(kW1)].value.transpose() * da1 / static_cast<double>(n);

  // Every attended column receives dpooled; the residual passes it through.
  MatrixXd dtokens = dpooled.replicate(1, n);
  if (kind_ == EncoderKind::kAttention) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const Attention::Cache& ac = cache.attention[i];
      // Recompute the head outputs for the Wo gradient.
      VectorXd heads(ac.q.size());
      const int h_count = static_cast<int>(ac.weights.size());
      const Eigen::Index dk = heads.size() / h_count;
      for (int h = 0; h < h_count; ++h) {
        heads.segment(h * dk, dk) = ac.v.middleRows(h * dk, dk) * ac.weights[h];
      }
      blocks[at(kWo)].grad += dpooled * heads.transpose();
      const VectorXd dheads = blocks[at(kWo)].value.transpose() * dpooled;
      VectorXd dquery = VectorXd::Zero(dpooled.size());
      MatrixXd dmemory = MatrixXd::Zero(dpooled.size(), n);
      attention_.Backward(blocks[at(kWq)].value, blocks[at(kWk)].value,
                          blocks[at(kWv)].value, ac, dheads,
                          &blocks[at(kWq)].grad, &blocks[at(kWk)].grad,
                          &blocks[at(kWv)].grad, &dquery, &dmemory);
      dtokens.col(i) += dquery;
      dtokens += dmemory;
    }
  }
  MatrixXd& demb = blocks[at(kEmbedding)].grad;
  for (Eigen::Index i = 0; i < n; ++i) demb.col(cache.ids[i]) += dtokens.col(i);
}

}  // namespace clarify
