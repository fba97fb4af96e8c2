// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "papr/layers.hpp"
#include "papr/psm.hpp"

namespace papr {

/// Channel-last pixel features [B, h, w, dim] of one hierarchical stage.
struct HierFeature {
  Tensor values;
  PatchGrid grid;

  std::size_t batch() const { return values.dim(0); }
  std::size_t dim() const { return values.dim(3); }
  void validate() const;
};

struct SplitResult {
  Tensor foreground;                    // [B, n_kept, dim], mask order
  std::vector<std::size_t> background;  // ascending flat indices
};

/// Partition pixel rows into the kept foreground and the background set.
SplitResult split(const HierFeature& a, const PruneMask& mask);

/// Scatter foreground rows back to their grid positions; every other row is 0.
HierFeature reassemble(const Tensor& foreground, const PruneMask& mask);

/// Apply a pixel operator to the kept rows only. Background rows of the
/// result are exactly zero (the bias is not added there).
HierFeature pixel_op_pruned(const HierFeature& a, const PruneMask& mask, const LinearLayer& op);

/// Depthwise k x k convolution over the spatial grid, "same" padding.
struct DepthwiseConv {
  Tensor weight;  // [dim, k, k]
  std::optional<Tensor> bias;

  std::size_t kernel() const { return weight.dim(1); }
  HierFeature operator()(const HierFeature& a) const;

  static DepthwiseConv random(std::size_t dim, std::size_t kernel, Rng& rng);
};

using SpatialOp = std::function<HierFeature(const HierFeature&)>;

/// ConvNeXt-style block: x + P_n(...gelu(P_1(norm(spatial(x))))). The
/// spatial operator and the norm always run dense; the pixel operators P_i
/// are the prunable part.
struct HierBlock {
  SpatialOp spatial;
  LayerNorm norm;
  std::vector<LinearLayer> pixel_ops;
};

HierFeature hier_block_forward(const HierFeature& a, const HierBlock& block, const PruneMask& mask);
HierFeature hier_block_forward_dense(const HierFeature& a, const HierBlock& block);

/// Toy hierarchical backbone: patchify stem, stages separated by 2x2
/// stride-2 downsampling convs, global mean pooling, norm, linear head.
struct HierStage {
  std::optional<Conv2dLayer> downsample;
  std::vector<HierBlock> blocks;
};

struct HierarchicalNet {
  Conv2dLayer stem;
  LayerNorm stem_norm;
  std::vector<HierStage> stages;
  LayerNorm norm;
  LinearLayer head;

  /// Images [3, H, W] -> logits [C].
  Tensor forward(const Tensor& image) const;
  /// One mask per stage, built from `proposal` at that stage's grid.
  Tensor forward_pruned(const Tensor& image, const RegionProposal& proposal, double z) const;
  /// Stage grids for an input image extent.
  std::vector<PatchGrid> stage_grids(std::size_t height, std::size_t width) const;

 private:
  Tensor run(const Tensor& image, const RegionProposal* proposal, double z) const;
};

/// [C, h, w] <-> [1, h, w, C].
HierFeature to_channel_last(const Tensor& chw);
Tensor to_channel_first(const HierFeature& a, std::size_t batch_index = 0);

}  // namespace papr
