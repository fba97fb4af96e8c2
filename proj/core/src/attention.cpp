// SPDX-License-Identifier: Apache-2.0
#include "papr/attention.hpp"

#include <cmath>

namespace papr {

void AttentionBlock::validate() const {
  if (dim == 0 || heads == 0 || dim % heads != 0) {
    throw TensorError("attention block: dim " + std::to_string(dim) + " not divisible by heads " +
                      std::to_string(heads));
  }
  qkv.validate();
  proj.validate();
  fc1.validate();
  fc2.validate();
  if (norm1.size() != dim || norm2.size() != dim) throw TensorError("attention block: norm size mismatch");
  if (qkv.in_features() != dim || qkv.out_features() != 3 * dim) throw TensorError("attention block: qkv shape");
  if (proj.in_features() != dim || proj.out_features() != dim) throw TensorError("attention block: proj shape");
  if (fc1.in_features() != dim || fc2.out_features() != dim || fc2.in_features() != fc1.out_features()) {
    throw TensorError("attention block: mlp shape");
  }
}

AttentionBlock AttentionBlock::random(std::size_t dim, std::size_t heads, std::size_t mlp_hidden, Rng& rng) {
  AttentionBlock b;
  b.dim = dim;
  b.heads = heads;
  b.norm1 = LayerNorm::identity(dim);
  b.qkv = LinearLayer::random(dim, 3 * dim, rng);
  b.proj = LinearLayer::random(dim, dim, rng);
  b.norm2 = LayerNorm::identity(dim);
  b.fc1 = LinearLayer::random(dim, mlp_hidden, rng);
  b.fc2 = LinearLayer::random(mlp_hidden, dim, rng);
  b.validate();
  return b;
}

Tensor multi_head_attention(const Tensor& tokens, const AttentionBlock& block) {
  const std::size_t n = tokens.dim(0);
  const std::size_t dim = block.dim;
  const std::size_t dh = block.head_dim();
  const Tensor qkv = linear(tokens, block.qkv);  // [N, 3*dim]
  const float scale = 1.0f / std::sqrt(static_cast<float>(dh));

  Tensor mixed({n, dim});
  Tensor scores({n, n});
  for (std::size_t h = 0; h < block.heads; ++h) {
    const std::size_t qo = h * dh;
    const std::size_t ko = dim + h * dh;
    const std::size_t vo = 2 * dim + h * dh;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        float acc = 0.0f;
        for (std::size_t c = 0; c < dh; ++c) acc += qkv[i * 3 * dim + qo + c] * qkv[j * 3 * dim + ko + c];
        scores[i * n + j] = acc * scale;
      }
    }
    const Tensor attn = softmax_rows(scores);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < dh; ++c) {
        float acc = 0.0f;
        for (std::size_t j = 0; j < n; ++j) acc += attn[i * n + j] * qkv[j * 3 * dim + vo + c];
        mixed[i * dim + qo + c] = acc;
      }
    }
  }
  return linear(mixed, block.proj);
}

Tensor attention_forward(const Tensor& tokens, const AttentionBlock& block) {
  block.validate();
  require_rank(tokens, 2, "attention_forward input");
  if (tokens.dim(1) != block.dim) {
    throw TensorError("attention_forward: token dim " + std::to_string(tokens.dim(1)) + " != block dim " +
                      std::to_string(block.dim));
  }
  Tensor x = add(tokens, multi_head_attention(layer_norm(tokens, block.norm1), block));
  Tensor mlp = linear(gelu(linear(layer_norm(x, block.norm2), block.fc1)), block.fc2);
  return add(x, mlp);
}

}  // namespace papr
