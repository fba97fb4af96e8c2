// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "papr/layers.hpp"
#include "papr/psm.hpp"

namespace papr {

/// Lightweight convolutional proposal network: conv -> ReLU stack whose
/// final activations are the feature map handed to region_proposal.
/// The FC classifier of a full ConvNet is never evaluated.
struct ProposalNet {
  std::vector<Conv2dLayer> layers;

  std::size_t in_channels() const { return layers.front().in_channels(); }
  std::size_t out_channels() const { return layers.back().out_channels(); }
  /// Spatial down-scaling factor d (product of strides).
  std::size_t downscale() const;

  /// Image [3, H, W] -> features [K, h, w].
  ConvFeatureMap forward(const Tensor& image) const;
  /// Frames [T, 3, H, W] -> features [K, T, h, w], frames processed independently.
  ConvFeatureMap forward_clip(const Tensor& frames) const;
};

}  // namespace papr
