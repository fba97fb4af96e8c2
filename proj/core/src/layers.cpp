// SPDX-License-Identifier: Apache-2.0
#include "papr/layers.hpp"

#include <algorithm>
#include <cmath>

namespace papr {

void LinearLayer::validate() const {
  require_rank(weight, 2, "linear weight");
  if (bias) {
    require_rank(*bias, 1, "linear bias");
    if (bias->numel() != out_features()) throw TensorError("linear bias length does not match out features");
  }
}

LinearLayer LinearLayer::random(std::size_t in, std::size_t out, Rng& rng, bool with_bias) {
  const float s = 1.0f / std::sqrt(static_cast<float>(in));
  LinearLayer layer{rng.uniform_tensor({out, in}, -s, s), std::nullopt};
  if (with_bias) layer.bias = rng.uniform_tensor({out}, -s, s);
  return layer;
}

LinearLayer LinearLayer::identity(std::size_t n) {
  Tensor w({n, n});
  for (std::size_t i = 0; i < n; ++i) w.at({i, i}) = 1.0f;
  return {std::move(w), std::nullopt};
}

std::array<std::size_t, 2> Conv2dLayer::output_extent(std::size_t in_h, std::size_t in_w) const {
  const auto [kh, kw] = kernel();
  std::array<std::size_t, 2> out{};
  const std::array<std::size_t, 2> in{in_h, in_w};
  const std::array<std::size_t, 2> k{kh, kw};
  for (int a = 0; a < 2; ++a) {
    const std::size_t padded = in[a] + 2 * padding[a];
    if (padded < k[a]) {
      throw TensorError("conv2d: kernel larger than padded input on axis " + std::to_string(a));
    }
    out[a] = (padded - k[a]) / stride[a] + 1;
  }
  return out;
}

void Conv2dLayer::validate() const {
  require_rank(weight, 4, "conv2d weight");
  if (stride[0] == 0 || stride[1] == 0) throw TensorError("conv2d stride must be positive");
  if (bias) {
    require_rank(*bias, 1, "conv2d bias");
    if (bias->numel() != out_channels()) throw TensorError("conv2d bias length does not match out channels");
  }
}

Conv2dLayer Conv2dLayer::random(std::size_t in_c, std::size_t out_c, std::size_t kernel,
                                std::size_t stride, std::size_t padding, Rng& rng) {
  const float s = 1.0f / std::sqrt(static_cast<float>(in_c * kernel * kernel));
  Conv2dLayer layer;
  layer.weight = rng.uniform_tensor({out_c, in_c, kernel, kernel}, -s, s);
  layer.bias = rng.uniform_tensor({out_c}, -s, s);
  layer.stride = {stride, stride};
  layer.padding = {padding, padding};
  return layer;
}

LayerNorm LayerNorm::identity(std::size_t n) {
  return {Tensor::full({n}, 1.0f), Tensor::zeros({n}), 1e-6f};
}

Tensor conv2d(const Tensor& input, const Conv2dLayer& layer) {
  layer.validate();
  require_rank(input, 3, "conv2d input");
  const std::size_t in_c = input.dim(0);
  const std::size_t in_h = input.dim(1);
  const std::size_t in_w = input.dim(2);
  if (in_c != layer.in_channels()) {
    throw TensorError("conv2d: input has " + std::to_string(in_c) + " channels, layer expects " +
                      std::to_string(layer.in_channels()));
  }
  const auto [kh, kw] = layer.kernel();
  const auto [out_h, out_w] = layer.output_extent(in_h, in_w);
  const std::size_t out_c = layer.out_channels();
  const auto [sh, sw] = layer.stride;
  const auto ph = static_cast<std::ptrdiff_t>(layer.padding[0]);
  const auto pw = static_cast<std::ptrdiff_t>(layer.padding[1]);

  Tensor out({out_c, out_h, out_w});
  const auto x = input.data();
  const auto w = layer.weight.data();
  for (std::size_t oc = 0; oc < out_c; ++oc) {
    const float b = layer.bias ? (*layer.bias)[oc] : 0.0f;
    for (std::size_t oy = 0; oy < out_h; ++oy) {
      for (std::size_t ox = 0; ox < out_w; ++ox) {
        float acc = 0.0f;
        for (std::size_t ic = 0; ic < in_c; ++ic) {
          for (std::size_t ky = 0; ky < kh; ++ky) {
            const auto iy = static_cast<std::ptrdiff_t>(oy * sh + ky) - ph;
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(in_h)) continue;
            for (std::size_t kx = 0; kx < kw; ++kx) {
              const auto ix = static_cast<std::ptrdiff_t>(ox * sw + kx) - pw;
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(in_w)) continue;
              acc += w[((oc * in_c + ic) * kh + ky) * kw + kx] *
                     x[(ic * in_h + static_cast<std::size_t>(iy)) * in_w + static_cast<std::size_t>(ix)];
            }
          }
        }
        out[(oc * out_h + oy) * out_w + ox] = acc + b;
      }
    }
  }
  check_finite(out, "conv2d");
  return out;
}

Tensor linear(const Tensor& input, const LinearLayer& layer) {
  layer.validate();
  if (input.rank() == 0) throw TensorError("linear: input has no axes");
  const std::size_t in = layer.in_features();
  const std::size_t out_f = layer.out_features();
  if (input.dims().back() != in) {
    throw TensorError("linear: inner dimension " + std::to_string(input.dims().back()) +
                      " does not match layer input " + std::to_string(in));
  }
  const std::size_t rows = input.numel() / in;
  Dims out_dims = input.dims();
  out_dims.back() = out_f;
  Tensor out(std::move(out_dims));
  const auto x = input.data();
  const auto w = layer.weight.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const float* row = x.data() + r * in;
    for (std::size_t o = 0; o < out_f; ++o) {
      const float* wr = w.data() + o * in;
      float acc = 0.0f;
      for (std::size_t i = 0; i < in; ++i) acc += wr[i] * row[i];
      out[r * out_f + o] = layer.bias ? acc + (*layer.bias)[o] : acc;
    }
  }
  check_finite(out, "linear");
  return out;
}

Tensor global_avg_pool(const Tensor& features) {
  require_rank(features, 3, "global_avg_pool input");
  const std::size_t k = features.dim(0);
  const std::size_t hw = features.dim(1) * features.dim(2);
  Tensor out({k});
  for (std::size_t c = 0; c < k; ++c) {
    float acc = 0.0f;
    for (std::size_t i = 0; i < hw; ++i) acc += features[c * hw + i];
    out[c] = acc / static_cast<float>(hw);
  }
  check_finite(out, "global_avg_pool");
  return out;
}

Tensor layer_norm(const Tensor& input, const LayerNorm& norm) {
  const std::size_t n = norm.size();
  if (input.rank() == 0 || input.dims().back() != n || norm.beta.numel() != n) {
    throw TensorError("layer_norm: feature size mismatch");
  }
  Tensor out = input;
  const std::size_t rows = input.numel() / n;
  auto y = out.data();
  for (std::size_t r = 0; r < rows; ++r) {
    float* row = y.data() + r * n;
    float mean = 0.0f;
    for (std::size_t i = 0; i < n; ++i) mean += row[i];
    mean /= static_cast<float>(n);
    float var = 0.0f;
    for (std::size_t i = 0; i < n; ++i) var += (row[i] - mean) * (row[i] - mean);
    var /= static_cast<float>(n);
    const float inv = 1.0f / std::sqrt(var + norm.eps);
    for (std::size_t i = 0; i < n; ++i) row[i] = (row[i] - mean) * inv * norm.gamma[i] + norm.beta[i];
  }
  check_finite(out, "layer_norm");
  return out;
}

Tensor relu(Tensor t) {
  for (auto& v : t.data()) v = std::max(v, 0.0f);
  return t;
}

Tensor gelu(Tensor t) {
  for (auto& v : t.data()) v = 0.5f * v * (1.0f + std::erf(v * 0.70710678118654752f));
  return t;
}

Tensor softmax_rows(Tensor t) {
  if (t.rank() == 0) throw TensorError("softmax_rows: input has no axes");
  const std::size_t n = t.dims().back();
  const std::size_t rows = t.numel() / n;
  auto y = t.data();
  for (std::size_t r = 0; r < rows; ++r) {
    float* row = y.data() + r * n;
    const float m = *std::max_element(row, row + n);
    float sum = 0.0f;
    for (std::size_t i = 0; i < n; ++i) {
      row[i] = std::exp(row[i] - m);
      sum += row[i];
    }
    for (std::size_t i = 0; i < n; ++i) row[i] /= sum;
  }
  check_finite(t, "softmax_rows");
  return t;
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.dims() != b.dims()) {
    throw TensorError("add: shape mismatch " + dims_to_string(a.dims()) + " vs " + dims_to_string(b.dims()));
  }
  Tensor out = a;
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] += b[i];
  check_finite(out, "add");
  return out;
}

}  // namespace papr
