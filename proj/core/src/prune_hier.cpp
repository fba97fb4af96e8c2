// SPDX-License-Identifier: Apache-2.0
#include "papr/prune_hier.hpp"

#include <algorithm>
#include <cmath>

namespace papr {

void HierFeature::validate() const {
  require_rank(values, 4, "hierarchical feature");
  if (grid.rank() != 2 || grid.extents()[0] != values.dim(1) || grid.extents()[1] != values.dim(2)) {
    throw TensorError("hierarchical feature: grid " + grid.to_string() + " does not match values " +
                      dims_to_string(values.dims()));
  }
}

namespace {

void require_same_grid(const HierFeature& a, const PruneMask& mask, const char* op) {
  a.validate();
  if (mask.grid != a.grid) {
    throw TensorError(std::string(op) + ": mask grid " + mask.grid.to_string() + " does not match feature grid " +
                      a.grid.to_string());
  }
}

}  // namespace

SplitResult split(const HierFeature& a, const PruneMask& mask) {
  require_same_grid(a, mask, "split");
  const std::size_t b = a.batch();
  const std::size_t d = a.dim();
  const std::size_t n = a.grid.n_patches();
  const std::size_t k = mask.keep_count();
  Tensor fg({b, k, d});
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const float* src = a.values.data().data() + (i * n + mask.kept[j]) * d;
      std::copy_n(src, d, fg.data().data() + (i * k + j) * d);
    }
  }
  return {std::move(fg), mask.dropped()};
}

HierFeature reassemble(const Tensor& foreground, const PruneMask& mask) {
  require_rank(foreground, 3, "reassemble foreground");
  const std::size_t k = mask.keep_count();
  if (foreground.dim(1) != k) throw TensorError("reassemble: foreground rows do not match mask keep count");
  const std::size_t b = foreground.dim(0);
  const std::size_t d = foreground.dim(2);
  const auto& ext = mask.grid.extents();
  if (ext.size() != 2) throw TensorError("reassemble: mask grid must be 2-D");
  const std::size_t n = mask.grid.n_patches();
  Tensor out({b, ext[0], ext[1], d});
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      std::copy_n(foreground.data().data() + (i * k + j) * d, d, out.data().data() + (i * n + mask.kept[j]) * d);
    }
  }
  return {std::move(out), mask.grid};
}

HierFeature pixel_op_pruned(const HierFeature& a, const PruneMask& mask, const LinearLayer& op) {
  require_same_grid(a, mask, "pixel_op_pruned");
  op.validate();
  if (op.in_features() != a.dim()) {
    throw TensorError("pixel_op_pruned: operator expects dim " + std::to_string(op.in_features()) + ", feature has " +
                      std::to_string(a.dim()));
  }
  const SplitResult parts = split(a, mask);
  return reassemble(linear(parts.foreground, op), mask);
}

HierFeature DepthwiseConv::operator()(const HierFeature& a) const {
  a.validate();
  require_rank(weight, 3, "depthwise weight");
  const std::size_t k = kernel();
  if (weight.dim(2) != k || k % 2 == 0) throw TensorError("depthwise conv: kernel must be square and odd");
  const std::size_t d = a.dim();
  if (weight.dim(0) != d) throw TensorError("depthwise conv: channel mismatch");
  const std::size_t b = a.batch();
  const std::size_t h = a.values.dim(1);
  const std::size_t w = a.values.dim(2);
  const auto pad = static_cast<std::ptrdiff_t>(k / 2);
  Tensor out({b, h, w, d});
  const auto x = a.values.data();
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t xx = 0; xx < w; ++xx) {
        for (std::size_t c = 0; c < d; ++c) {
          float acc = 0.0f;
          for (std::size_t ky = 0; ky < k; ++ky) {
            const auto iy = static_cast<std::ptrdiff_t>(y + ky) - pad;
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) continue;
            for (std::size_t kx = 0; kx < k; ++kx) {
              const auto ix = static_cast<std::ptrdiff_t>(xx + kx) - pad;
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(w)) continue;
              acc += weight[(c * k + ky) * k + kx] *
                     x[((i * h + static_cast<std::size_t>(iy)) * w + static_cast<std::size_t>(ix)) * d + c];
            }
          }
          out[((i * h + y) * w + xx) * d + c] = bias ? acc + (*bias)[c] : acc;
        }
      }
    }
  }
  check_finite(out, "depthwise conv");
  return {std::move(out), a.grid};
}

DepthwiseConv DepthwiseConv::random(std::size_t dim, std::size_t kernel, Rng& rng) {
  const float s = 1.0f / static_cast<float>(kernel);
  return {rng.uniform_tensor({dim, kernel, kernel}, -s, s), rng.uniform_tensor({dim}, -s, s)};
}

namespace {

HierFeature block_forward(const HierFeature& a, const HierBlock& block, const PruneMask* mask) {
  if (block.pixel_ops.empty()) throw TensorError("hierarchical block has no pixel operators");
  HierFeature x = block.spatial ? block.spatial(a) : a;
  x.values = layer_norm(x.values, block.norm);
  for (std::size_t i = 0; i < block.pixel_ops.size(); ++i) {
    if (mask) {
      x = pixel_op_pruned(x, *mask, block.pixel_ops[i]);
    } else {
      x.values = linear(x.values, block.pixel_ops[i]);
    }
    if (i + 1 < block.pixel_ops.size()) x.values = gelu(std::move(x.values));
  }
  if (x.values.dims() != a.values.dims()) throw TensorError("hierarchical block: residual shape mismatch");
  return {add(a.values, x.values), a.grid};
}

}  // namespace

HierFeature hier_block_forward(const HierFeature& a, const HierBlock& block, const PruneMask& mask) {
  require_same_grid(a, mask, "hier_block_forward");
  return block_forward(a, block, &mask);
}

HierFeature hier_block_forward_dense(const HierFeature& a, const HierBlock& block) {
  a.validate();
  return block_forward(a, block, nullptr);
}

HierFeature to_channel_last(const Tensor& chw) {
  require_rank(chw, 3, "to_channel_last input");
  const std::size_t c = chw.dim(0);
  const std::size_t h = chw.dim(1);
  const std::size_t w = chw.dim(2);
  Tensor out({1, h, w, c});
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t p = 0; p < h * w; ++p) out[p * c + ch] = chw[ch * h * w + p];
  }
  return {std::move(out), PatchGrid({h, w})};
}

Tensor to_channel_first(const HierFeature& a, std::size_t batch_index) {
  a.validate();
  const std::size_t h = a.values.dim(1);
  const std::size_t w = a.values.dim(2);
  const std::size_t c = a.dim();
  Tensor out({c, h, w});
  const float* base = a.values.data().data() + batch_index * h * w * c;
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t p = 0; p < h * w; ++p) out[ch * h * w + p] = base[p * c + ch];
  }
  return out;
}

std::vector<PatchGrid> HierarchicalNet::stage_grids(std::size_t height, std::size_t width) const {
  auto [h, w] = stem.output_extent(height, width);
  std::vector<PatchGrid> grids;
  for (const auto& stage : stages) {
    if (stage.downsample) {
      const auto e = stage.downsample->output_extent(h, w);
      h = e[0];
      w = e[1];
    }
    grids.emplace_back(Dims{h, w});
  }
  return grids;
}

Tensor HierarchicalNet::run(const Tensor& image, const RegionProposal* proposal, double z) const {
  HierFeature x = to_channel_last(conv2d(image, stem));
  x.values = layer_norm(x.values, stem_norm);
  for (const auto& stage : stages) {
    if (stage.downsample) x = to_channel_last(conv2d(to_channel_first(x), *stage.downsample));
    std::optional<PruneMask> mask;
    if (proposal) mask = build_mask(build_psm(*proposal, x.grid), z);
    for (const auto& block : stage.blocks) {
      x = mask ? hier_block_forward(x, block, *mask) : hier_block_forward_dense(x, block);
    }
  }
  const std::size_t n = x.grid.n_patches();
  const std::size_t d = x.dim();
  Tensor pooled({1, d});
  for (std::size_t c = 0; c < d; ++c) {
    float acc = 0.0f;
    for (std::size_t p = 0; p < n; ++p) acc += x.values[p * d + c];
    pooled[c] = acc / static_cast<float>(n);
  }
  return linear(layer_norm(pooled, norm), head).reshaped({head.out_features()});
}

Tensor HierarchicalNet::forward(const Tensor& image) const { return run(image, nullptr, 1.0); }

Tensor HierarchicalNet::forward_pruned(const Tensor& image, const RegionProposal& proposal, double z) const {
  return run(image, &proposal, z);
}

}  // namespace papr
