// SPDX-License-Identifier: Apache-2.0
// Brute-force reference implementations. Written independently of core:
// plain loops, double accumulation, no shared helpers.
#pragma once

#include <cstddef>
#include <vector>

#include "papr/attention.hpp"
#include "papr/layers.hpp"
#include "papr/psm.hpp"

namespace papr::oracle {

/// Direct 7-loop convolution, zero padding.
Tensor conv2d(const Tensor& input, const Conv2dLayer& layer);

/// y[r, o] = b[o] + sum_i x[r, i] w[o, i], rows over every leading axis.
Tensor linear(const Tensor& input, const LinearLayer& layer);

/// Flat sum over each channel divided by h*w.
Tensor global_avg_pool(const Tensor& features);

/// Each output pixel evaluated on its own from the Keys kernel with
/// a = -0.5, half-pixel centres and clamped taps.
Tensor bicubic(const Tensor& src, std::size_t dst_h, std::size_t dst_w);

/// Top-k by (value desc, index asc) using pairwise comparisons only.
std::vector<std::size_t> top_k(const std::vector<float>& values, std::size_t k);

/// Boolean keep-vector filter: row i survives iff keep[i].
std::vector<std::size_t> kept_rows(const std::vector<bool>& keep);

/// Pre-norm block written out for a handful of tokens, no shared code
/// with the core attention path.
Tensor attention_block(const Tensor& tokens, const AttentionBlock& block);

/// Apply `op` to every row then zero the rows where keep is false.
Tensor dense_then_zero(const Tensor& rows, const LinearLayer& op, const std::vector<bool>& keep);

/// Random helpers.
Tensor random_tensor(Rng& rng, Dims dims, float lo = -1.0f, float hi = 1.0f);
PatchSignificanceMap random_psm(Rng& rng, const PatchGrid& grid);

}  // namespace papr::oracle
