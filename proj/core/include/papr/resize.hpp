// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "papr/tensor.hpp"

namespace papr {

/// Catmull-Rom coefficient used by bicubic_resize.
inline constexpr double kBicubicA = -0.5;

/// Cubic convolution kernel weight at signed distance `x`.
double cubic_kernel(double x, double a = kBicubicA);

/// Separable bicubic resampling of a [h, w] map.
///
/// Output pixel (y, x) samples the source at half-pixel-centre coordinates
/// src = (dst + 0.5) * src_extent / dst_extent - 0.5, with taps outside the
/// source clamped to the nearest edge pixel. When the target equals the
/// source extent the input is returned unchanged.
Tensor bicubic_resize(const Tensor& src, std::size_t dst_h, std::size_t dst_w);

/// Linear resampling along axis 0 of a tensor of any rank, same
/// half-pixel-centre mapping, source coordinate clamped to [0, n-1].
Tensor linear_resize_axis0(const Tensor& src, std::size_t dst_n);

}  // namespace papr
