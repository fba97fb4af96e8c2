// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "papr/attention.hpp"
#include "papr/layers.hpp"
#include "papr/psm.hpp"

namespace papr {

/// Tokens [B, N, dim] after patch embedding and positional embedding.
/// With a class token it sits at position 0 and N = n_patches + 1.
struct TokenBatch {
  Tensor tokens;
  bool has_class_token = false;
  PatchGrid grid;

  std::size_t batch() const { return tokens.dim(0); }
  std::size_t count() const { return tokens.dim(1); }
  std::size_t dim() const { return tokens.dim(2); }
  void validate() const;
};

/// Gather the kept patch tokens of each batch element in mask order. The
/// class token, when present, stays at position 0. All masks must share the
/// batch grid and one keep count.
TokenBatch prune_tokens(const TokenBatch& batch, std::span<const PruneMask> masks);

/// Final norm (optional) + linear classifier.
struct ClassifierHead {
  std::optional<LayerNorm> norm;
  LinearLayer fc;

  ClassifierHead() = default;
  ClassifierHead(LinearLayer linear) : fc(std::move(linear)) {}  // NOLINT(google-explicit-constructor)
  ClassifierHead(std::optional<LayerNorm> n, LinearLayer linear) : norm(std::move(n)), fc(std::move(linear)) {}
};

/// Called after every block with the tokens of one batch element. This is
/// the attachment point for intermediate token reduction such as merging;
/// the hook may shrink the sequence but must keep the class token first.
using BlockHook = std::function<void(std::size_t block_index, std::size_t batch_index, Tensor& tokens)>;

/// Logits [B, C]: class token readout, or the mean over patch tokens when
/// the model has no class token.
Tensor vit_forward(const TokenBatch& batch, std::span<const AttentionBlock> blocks, const ClassifierHead& head,
                   const BlockHook& hook = {});

/// Prune once right after embedding, then run every block on the reduced
/// sequence.
Tensor vit_forward_pruned(const TokenBatch& batch, std::span<const AttentionBlock> blocks,
                          std::span<const PruneMask> masks, const ClassifierHead& head,
                          const BlockHook& hook = {});

/// Small ViT: conv patch embedding, optional class token, learned
/// positional embedding, pre-norm blocks, final norm and linear head.
struct VisionTransformer {
  std::size_t patch = 16;
  Conv2dLayer patch_embed;
  std::optional<Tensor> class_token;  // [dim]
  Tensor pos_embed;                   // [N, dim]
  std::vector<AttentionBlock> blocks;
  ClassifierHead head;

  std::size_t dim() const { return patch_embed.out_channels(); }
  PatchGrid grid_for(std::size_t height, std::size_t width) const;

  /// Images [B, 3, H, W] -> embedded TokenBatch (positional embedding added).
  TokenBatch embed(const Tensor& images) const;
  Tensor forward(const Tensor& images) const;
  Tensor forward_pruned(const Tensor& images, std::span<const PruneMask> masks) const;
};

}  // namespace papr
