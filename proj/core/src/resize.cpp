// SPDX-License-Identifier: Apache-2.0
#include "papr/resize.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace papr {

double cubic_kernel(double x, double a) {
  x = std::abs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

namespace {

struct Taps {
  std::array<std::size_t, 4> index;
  std::array<double, 4> weight;
};

// Four source taps and weights for every output coordinate along one axis.
std::vector<Taps> axis_taps(std::size_t src_n, std::size_t dst_n) {
  std::vector<Taps> taps(dst_n);
  const double scale = static_cast<double>(src_n) / static_cast<double>(dst_n);
  const auto last = static_cast<std::ptrdiff_t>(src_n) - 1;
  for (std::size_t d = 0; d < dst_n; ++d) {
    const double src = (static_cast<double>(d) + 0.5) * scale - 0.5;
    const double base = std::floor(src);
    const double t = src - base;
    const auto b = static_cast<std::ptrdiff_t>(base);
    for (int k = 0; k < 4; ++k) {
      const std::ptrdiff_t i = std::clamp<std::ptrdiff_t>(b - 1 + k, 0, last);
      taps[d].index[k] = static_cast<std::size_t>(i);
      taps[d].weight[k] = cubic_kernel(t - static_cast<double>(k - 1));
    }
  }
  return taps;
}

}  // namespace

Tensor bicubic_resize(const Tensor& src, std::size_t dst_h, std::size_t dst_w) {
  require_rank(src, 2, "bicubic_resize input");
  if (dst_h == 0 || dst_w == 0) throw TensorError("bicubic_resize: target extents must be positive");
  const std::size_t h = src.dim(0);
  const std::size_t w = src.dim(1);
  if (h == dst_h && w == dst_w) return src;

  // Horizontal pass then vertical pass. Weights and sums are double so that
  // constant maps come back exactly.
  const auto xt = axis_taps(w, dst_w);
  const auto yt = axis_taps(h, dst_h);
  Tensor rows({h, dst_w});
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < dst_w; ++x) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += xt[x].weight[k] * src[y * w + xt[x].index[k]];
      rows[y * dst_w + x] = static_cast<float>(acc);
    }
  }
  Tensor out({dst_h, dst_w});
  for (std::size_t y = 0; y < dst_h; ++y) {
    for (std::size_t x = 0; x < dst_w; ++x) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += yt[y].weight[k] * rows[yt[y].index[k] * dst_w + x];
      out[y * dst_w + x] = static_cast<float>(acc);
    }
  }
  check_finite(out, "bicubic_resize");
  return out;
}

Tensor linear_resize_axis0(const Tensor& src, std::size_t dst_n) {
  if (src.rank() == 0) throw TensorError("linear_resize_axis0: input has no axes");
  if (dst_n == 0) throw TensorError("linear_resize_axis0: target extent must be positive");
  const std::size_t n = src.dim(0);
  if (n == dst_n) return src;
  const std::size_t slice = src.numel() / n;
  Dims dims = src.dims();
  dims[0] = dst_n;
  Tensor out(std::move(dims));
  const double scale = static_cast<double>(n) / static_cast<double>(dst_n);
  for (std::size_t d = 0; d < dst_n; ++d) {
    const double pos = std::clamp((static_cast<double>(d) + 0.5) * scale - 0.5, 0.0,
                                  static_cast<double>(n - 1));
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double t = pos - static_cast<double>(lo);
    for (std::size_t i = 0; i < slice; ++i) {
      out[d * slice + i] = static_cast<float>((1.0 - t) * src[lo * slice + i] + t * src[hi * slice + i]);
    }
  }
  check_finite(out, "linear_resize_axis0");
  return out;
}

}  // namespace papr
