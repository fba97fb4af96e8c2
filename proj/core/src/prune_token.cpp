// SPDX-License-Identifier: Apache-2.0
#include "papr/prune_token.hpp"

#include <algorithm>

namespace papr {

void TokenBatch::validate() const {
  require_rank(tokens, 3, "token batch");
  const std::size_t expected = grid.n_patches() + (has_class_token ? 1 : 0);
  if (tokens.dim(1) != expected) {
    throw TensorError("token batch: " + std::to_string(tokens.dim(1)) + " tokens, grid " + grid.to_string() +
                      (has_class_token ? " plus class token" : "") + " needs " + std::to_string(expected));
  }
}

TokenBatch prune_tokens(const TokenBatch& batch, std::span<const PruneMask> masks) {
  batch.validate();
  const std::size_t b = batch.batch();
  if (masks.size() != b) {
    throw TensorError("prune_tokens: " + std::to_string(masks.size()) + " masks for batch of " + std::to_string(b));
  }
  const std::size_t kept = masks.front().keep_count();
  for (const auto& m : masks) {
    if (m.grid != batch.grid) throw TensorError("prune_tokens: mask grid " + m.grid.to_string() +
                                                " does not match batch grid " + batch.grid.to_string());
    if (m.keep_count() != kept) throw TensorError("prune_tokens: unequal keep counts across the batch");
  }

  const std::size_t n = batch.count();
  const std::size_t d = batch.dim();
  const std::size_t offset = batch.has_class_token ? 1 : 0;
  const std::size_t n_out = kept + offset;
  Tensor out({b, n_out, d});
  const auto src = batch.tokens.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < b; ++i) {
    const float* in_base = src.data() + i * n * d;
    float* out_base = dst.data() + i * n_out * d;
    if (batch.has_class_token) std::copy_n(in_base, d, out_base);
    for (std::size_t j = 0; j < kept; ++j) {
      const std::size_t patch = masks[i].kept[j];
      if (patch >= batch.grid.n_patches()) throw TensorError("prune_tokens: mask index out of range");
      std::copy_n(in_base + (patch + offset) * d, d, out_base + (j + offset) * d);
    }
  }

  TokenBatch result;
  result.tokens = std::move(out);
  result.has_class_token = batch.has_class_token;
  // Pruned sequences no longer tile a grid; describe them as a flat run.
  result.grid = PatchGrid({kept});
  return result;
}

namespace {

Tensor slice_batch(const Tensor& tokens, std::size_t i) {
  const std::size_t n = tokens.dim(1);
  const std::size_t d = tokens.dim(2);
  const auto first = tokens.data().begin() + static_cast<std::ptrdiff_t>(i * n * d);
  return Tensor({n, d}, std::vector<float>(first, first + static_cast<std::ptrdiff_t>(n * d)));
}

Tensor run_blocks(const Tensor& tokens, bool has_class_token, std::span<const AttentionBlock> blocks,
                  const ClassifierHead& head, const BlockHook& hook) {
  const std::size_t b = tokens.dim(0);
  const std::size_t classes = head.fc.out_features();
  Tensor logits({b, classes});
  for (std::size_t i = 0; i < b; ++i) {
    Tensor x = slice_batch(tokens, i);
    for (std::size_t l = 0; l < blocks.size(); ++l) {
      x = attention_forward(x, blocks[l]);
      if (hook) hook(l, i, x);
    }
    if (head.norm) x = layer_norm(x, *head.norm);
    const std::size_t n = x.dim(0);
    const std::size_t d = x.dim(1);
    Tensor pooled({1, d});
    if (has_class_token) {
      std::copy_n(x.data().begin(), d, pooled.data().begin());
    } else {
      for (std::size_t c = 0; c < d; ++c) {
        float acc = 0.0f;
        for (std::size_t t = 0; t < n; ++t) acc += x[t * d + c];
        pooled[c] = acc / static_cast<float>(n);
      }
    }
    const Tensor y = linear(pooled, head.fc);
    std::copy(y.data().begin(), y.data().end(), logits.data().begin() + static_cast<std::ptrdiff_t>(i * classes));
  }
  return logits;
}

}  // namespace

Tensor vit_forward(const TokenBatch& batch, std::span<const AttentionBlock> blocks, const ClassifierHead& head,
                   const BlockHook& hook) {
  batch.validate();
  return run_blocks(batch.tokens, batch.has_class_token, blocks, head, hook);
}

Tensor vit_forward_pruned(const TokenBatch& batch, std::span<const AttentionBlock> blocks,
                          std::span<const PruneMask> masks, const ClassifierHead& head, const BlockHook& hook) {
  const TokenBatch pruned = prune_tokens(batch, masks);
  return run_blocks(pruned.tokens, pruned.has_class_token, blocks, head, hook);
}

PatchGrid VisionTransformer::grid_for(std::size_t height, std::size_t width) const {
  if (height % patch != 0 || width % patch != 0) {
    throw TensorError("image " + std::to_string(height) + "x" + std::to_string(width) +
                      " is not divisible by patch size " + std::to_string(patch));
  }
  return PatchGrid({height / patch, width / patch});
}

TokenBatch VisionTransformer::embed(const Tensor& images) const {
  require_rank(images, 4, "vit input");
  const std::size_t b = images.dim(0);
  const PatchGrid grid = grid_for(images.dim(2), images.dim(3));
  const std::size_t n_patches = grid.n_patches();
  const std::size_t offset = class_token ? 1 : 0;
  const std::size_t n = n_patches + offset;
  const std::size_t d = dim();
  if (pos_embed.rank() != 2 || pos_embed.dim(0) != n || pos_embed.dim(1) != d) {
    throw TensorError("vit: positional embedding " + dims_to_string(pos_embed.dims()) + " does not fit " +
                      std::to_string(n) + " tokens of dim " + std::to_string(d));
  }

  const std::size_t image_size = images.numel() / b;
  const Dims image_dims(images.dims().begin() + 1, images.dims().end());
  Tensor tokens({b, n, d});
  for (std::size_t i = 0; i < b; ++i) {
    const auto first = images.data().begin() + static_cast<std::ptrdiff_t>(i * image_size);
    const Tensor image(image_dims, std::vector<float>(first, first + static_cast<std::ptrdiff_t>(image_size)));
    const Tensor patches = conv2d(image, patch_embed);  // [d, h', w']
    float* out = tokens.data().data() + i * n * d;
    if (class_token) {
      for (std::size_t c = 0; c < d; ++c) out[c] = (*class_token)[c] + pos_embed[c];
    }
    for (std::size_t p = 0; p < n_patches; ++p) {
      for (std::size_t c = 0; c < d; ++c) {
        out[(p + offset) * d + c] = patches[c * n_patches + p] + pos_embed[(p + offset) * d + c];
      }
    }
  }
  return {std::move(tokens), class_token.has_value(), grid};
}

Tensor VisionTransformer::forward(const Tensor& images) const { return vit_forward(embed(images), blocks, head); }

Tensor VisionTransformer::forward_pruned(const Tensor& images, std::span<const PruneMask> masks) const {
  return vit_forward_pruned(embed(images), blocks, masks, head);
}

}  // namespace papr
