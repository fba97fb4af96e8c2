// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "papr/tensor.hpp"

namespace papr {

/// Affine map over the last axis. weight is [out, in].
struct LinearLayer {
  Tensor weight;
  std::optional<Tensor> bias;

  std::size_t in_features() const { return weight.dim(1); }
  std::size_t out_features() const { return weight.dim(0); }
  void validate() const;

  /// Uniform init in [-s, s] with s = 1/sqrt(in).
  static LinearLayer random(std::size_t in, std::size_t out, Rng& rng, bool with_bias = true);
  static LinearLayer identity(std::size_t n);
};

/// Direct 2-D convolution, weight [outC, inC, kH, kW].
struct Conv2dLayer {
  Tensor weight;
  std::optional<Tensor> bias;
  std::array<std::size_t, 2> stride{1, 1};
  std::array<std::size_t, 2> padding{0, 0};

  std::size_t out_channels() const { return weight.dim(0); }
  std::size_t in_channels() const { return weight.dim(1); }
  std::array<std::size_t, 2> kernel() const { return {weight.dim(2), weight.dim(3)}; }
  /// Output spatial extents for an input of `in_h` x `in_w`; throws when either is < 1.
  std::array<std::size_t, 2> output_extent(std::size_t in_h, std::size_t in_w) const;
  void validate() const;

  static Conv2dLayer random(std::size_t in_c, std::size_t out_c, std::size_t kernel,
                            std::size_t stride, std::size_t padding, Rng& rng);
};

/// Per-row normalization over the last axis.
struct LayerNorm {
  Tensor gamma;
  Tensor beta;
  float eps = 1e-6f;

  std::size_t size() const { return gamma.numel(); }
  static LayerNorm identity(std::size_t n);
};

Tensor conv2d(const Tensor& input, const Conv2dLayer& layer);
Tensor linear(const Tensor& input, const LinearLayer& layer);
Tensor global_avg_pool(const Tensor& features);
Tensor layer_norm(const Tensor& input, const LayerNorm& norm);

Tensor relu(Tensor t);
/// Exact (erf) GELU. gelu(0) == 0, which keeps zeroed rows zero.
Tensor gelu(Tensor t);
/// Row-wise softmax over the last axis with max subtraction.
Tensor softmax_rows(Tensor t);
Tensor add(const Tensor& a, const Tensor& b);

}  // namespace papr
