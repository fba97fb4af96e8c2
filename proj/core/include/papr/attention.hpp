// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "papr/layers.hpp"
#include "papr/tensor.hpp"

namespace papr {

/// Pre-norm transformer encoder block:
///   x = x + proj(MHA(norm1(x)));  x = x + fc2(gelu(fc1(norm2(x))))
/// qkv maps dim -> 3*dim laid out as [q | k | v], heads split contiguously.
struct AttentionBlock {
  std::size_t dim = 0;
  std::size_t heads = 1;
  LayerNorm norm1;
  LinearLayer qkv;
  LinearLayer proj;
  LayerNorm norm2;
  LinearLayer fc1;
  LinearLayer fc2;

  std::size_t head_dim() const { return dim / heads; }
  std::size_t hidden() const { return fc1.out_features(); }
  void validate() const;

  static AttentionBlock random(std::size_t dim, std::size_t heads, std::size_t mlp_hidden, Rng& rng);
};

/// Multi-head self-attention on [N, dim] tokens, without the residual.
Tensor multi_head_attention(const Tensor& tokens, const AttentionBlock& block);

/// Full block on [N, dim] tokens. Permutation-equivariant over tokens.
Tensor attention_forward(const Tensor& tokens, const AttentionBlock& block);

}  // namespace papr
