// SPDX-License-Identifier: Apache-2.0
#include "papr/flops.hpp"

#include <algorithm>

#include "papr/psm.hpp"

namespace papr {

std::string to_string(OpKind k) {
  switch (k) {
    case OpKind::Embed: return "embed";
    case OpKind::TokenLinear: return "token-linear";
    case OpKind::TokenMix: return "token-mix";
    case OpKind::Pixel: return "pixel";
    case OpKind::Spatial: return "spatial";
    case OpKind::Transition: return "transition";
    case OpKind::Conv: return "conv";
    case OpKind::Head: return "head";
  }
  return "?";
}

Macs FlopReport::baseline_macs() const {
  Macs t = 0;
  for (const auto& e : entries) t += e.baseline;
  return t;
}

Macs FlopReport::pruned_macs() const {
  Macs t = 0;
  for (const auto& e : entries) t += e.pruned;
  return t;
}

Macs FlopReport::baseline_macs(OpKind kind) const {
  Macs t = 0;
  for (const auto& e : entries) {
    if (e.kind == kind) t += e.baseline;
  }
  return t;
}

Macs FlopReport::pruned_macs(OpKind kind) const {
  Macs t = 0;
  for (const auto& e : entries) {
    if (e.kind == kind) t += e.pruned;
  }
  return t;
}

double FlopReport::reduction_ratio() const {
  const Macs b = baseline_macs();
  return b == 0 ? 1.0 : static_cast<double>(pruned_macs()) / static_cast<double>(b);
}

double FlopReport::block_reduction_ratio() const {
  Macs b = 0;
  Macs p = 0;
  for (OpKind k : {OpKind::TokenLinear, OpKind::TokenMix, OpKind::Pixel, OpKind::Spatial}) {
    b += baseline_macs(k);
    p += pruned_macs(k);
  }
  return b == 0 ? 1.0 : static_cast<double>(p) / static_cast<double>(b);
}

double FlopReport::pixel_share() const {
  const Macs b = baseline_macs();
  return b == 0 ? 0.0 : static_cast<double>(baseline_macs(OpKind::Pixel)) / static_cast<double>(b);
}

namespace {

Macs m(std::size_t a) { return static_cast<Macs>(a); }

void push(FlopReport& r, std::string name, OpKind kind, Macs baseline, Macs pruned) {
  r.entries.push_back({std::move(name), kind, baseline, pruned});
}

}  // namespace

FlopReport count_vit(const ModelSpec& spec, double z) {
  spec.validate();
  if (spec.family != Family::TokenVit) throw SpecError("count_vit needs a token-vit spec");
  const Dims grid = token_grid(spec);
  const std::size_t n_patches = dims_product(grid);
  const std::size_t kept = keep_count(z, n_patches);
  const std::size_t cls = spec.class_token ? 1 : 0;
  const Macs n = m(n_patches + cls);
  const Macs np = m(kept + cls);
  const Macs d = m(spec.dim);
  const Macs hidden = m(spec.mlp_hidden());

  FlopReport r;
  r.model = spec.name;
  r.z = z;
  r.tokens_baseline = n_patches + cls;
  r.tokens_pruned = kept + cls;

  const Macs patch_in = m(spec.in_channels * spec.tubelet * spec.patch * spec.patch);
  const Macs embed = m(n_patches) * d * patch_in;
  push(r, "patch_embed", OpKind::Embed, embed, embed);

  for (std::size_t l = 0; l < spec.depth; ++l) {
    const std::string p = "block" + std::to_string(l) + ".";
    push(r, p + "qkv", OpKind::TokenLinear, n * 3 * d * d, np * 3 * d * d);
    // QK^T summed over heads is N^2 * dim, as is attn @ V.
    push(r, p + "attn_scores", OpKind::TokenMix, n * n * d, np * np * d);
    push(r, p + "attn_values", OpKind::TokenMix, n * n * d, np * np * d);
    push(r, p + "proj", OpKind::TokenLinear, n * d * d, np * d * d);
    push(r, p + "fc1", OpKind::TokenLinear, n * d * hidden, np * d * hidden);
    push(r, p + "fc2", OpKind::TokenLinear, n * hidden * d, np * hidden * d);
  }
  const Macs head = d * m(spec.num_classes);
  push(r, "head", OpKind::Head, head, head);
  return r;
}

FlopReport count_video_vit(const ModelSpec& spec, double z) {
  if (!spec.is_video()) throw SpecError("count_video_vit needs a T,H,W input");
  return count_vit(spec, z);
}

FlopReport count_hier(const ModelSpec& spec, double z) {
  spec.validate();
  if (spec.family != Family::Hierarchical) throw SpecError("count_hier needs a hierarchical spec");
  FlopReport r;
  r.model = spec.name;
  r.z = z;

  std::size_t h = spec.height() / spec.patch;
  std::size_t w = spec.width() / spec.patch;
  r.tokens_baseline = h * w;
  r.tokens_pruned = keep_count(z, h * w);

  const Macs stem = m(h * w) * m(spec.stage_dims[0]) * m(spec.in_channels * spec.patch * spec.patch);
  push(r, "stem", OpKind::Embed, stem, stem);

  const bool swin = spec.block == HierBlockKind::Swin;
  for (std::size_t s = 0; s < spec.stage_dims.size(); ++s) {
    const Macs d = m(spec.stage_dims[s]);
    const std::string sp = "stage" + std::to_string(s) + ".";
    if (s > 0) {
      const Macs prev = m(spec.stage_dims[s - 1]);
      h /= 2;
      w /= 2;
      // ConvNeXt: 2x2 stride-2 conv. Swin: patch merging, linear 4C -> 2C.
      const Macs down = m(h * w) * d * prev * 4;
      push(r, sp + "downsample", OpKind::Transition, down, down);
    }
    const Macs pixels = m(h * w);
    const Macs kept = m(keep_count(z, h * w));
    const Macs hidden = m(spec.mlp_hidden(spec.stage_dims[s]));
    for (std::size_t b = 0; b < spec.stage_depths[s]; ++b) {
      const std::string p = sp + "block" + std::to_string(b) + ".";
      if (swin) {
        const Macs win = m(std::min(spec.kernel, h) * std::min(spec.kernel, w));
        push(r, p + "qkv", OpKind::Spatial, pixels * 3 * d * d, pixels * 3 * d * d);
        push(r, p + "window_attn", OpKind::Spatial, pixels * win * d * 2, pixels * win * d * 2);
        push(r, p + "proj", OpKind::Spatial, pixels * d * d, pixels * d * d);
      } else {
        const Macs dw = pixels * d * m(spec.kernel * spec.kernel);
        push(r, p + "dwconv", OpKind::Spatial, dw, dw);
      }
      push(r, p + "fc1", OpKind::Pixel, pixels * d * hidden, kept * d * hidden);
      push(r, p + "fc2", OpKind::Pixel, pixels * hidden * d, kept * hidden * d);
    }
  }
  const Macs head = m(spec.stage_dims.back()) * m(spec.num_classes);
  push(r, "head", OpKind::Head, head, head);
  return r;
}

Macs ConvDesc::macs() const {
  return m(out_h()) * m(out_w()) * m(out_channels) * m(in_channels / groups) * m(kernel) * m(kernel);
}

namespace {

std::size_t conv_out(std::size_t in, std::size_t k, std::size_t s, std::size_t p) { return (in + 2 * p - k) / s + 1; }

struct LayoutBuilder {
  ConvNetLayout layout;
  std::size_t h = 0;
  std::size_t w = 0;

  // Adds a conv reading the current activation; returns its output size.
  ConvDesc& conv(std::string name, std::size_t in_c, std::size_t out_c, std::size_t k, std::size_t s,
                 std::size_t p, std::size_t groups = 1) {
    layout.convs.push_back({std::move(name), in_c, out_c, k, s, p, groups, h, w});
    return layout.convs.back();
  }
  void advance(const ConvDesc& c) {
    h = c.out_h();
    w = c.out_w();
  }
};

ConvNetLayout resnet_layout(int depth, std::size_t in_c, std::size_t height, std::size_t width,
                            std::size_t classes) {
  std::vector<int> blocks;
  bool bottleneck = false;
  switch (depth) {
    case 18: blocks = {2, 2, 2, 2}; break;
    case 34: blocks = {3, 4, 6, 3}; break;
    case 50: blocks = {3, 4, 6, 3}; bottleneck = true; break;
    case 101: blocks = {3, 4, 23, 3}; bottleneck = true; break;
    case 152: blocks = {3, 8, 36, 3}; bottleneck = true; break;
    default: throw SpecError("unsupported resnet depth " + std::to_string(depth));
  }
  LayoutBuilder b{{}, height, width};
  b.advance(b.conv("conv1", in_c, 64, 7, 2, 3));
  // 3x3 stride-2 max pool, no MACs.
  b.h = conv_out(b.h, 3, 2, 1);
  b.w = conv_out(b.w, 3, 2, 1);

  const std::size_t expansion = bottleneck ? 4 : 1;
  std::size_t in_planes = 64;
  for (std::size_t stage = 0; stage < 4; ++stage) {
    const std::size_t planes = std::size_t{64} << stage;
    for (int i = 0; i < blocks[stage]; ++i) {
      const std::size_t stride = (stage > 0 && i == 0) ? 2 : 1;
      const std::string p = "layer" + std::to_string(stage + 1) + "." + std::to_string(i) + ".";
      const std::size_t out_planes = planes * expansion;
      if (stride != 1 || in_planes != out_planes) {
        b.conv(p + "downsample", in_planes, out_planes, 1, stride, 0);
      }
      if (bottleneck) {
        b.advance(b.conv(p + "conv1", in_planes, planes, 1, 1, 0));
        b.advance(b.conv(p + "conv2", planes, planes, 3, stride, 1));
        b.advance(b.conv(p + "conv3", planes, out_planes, 1, 1, 0));
      } else {
        b.advance(b.conv(p + "conv1", in_planes, planes, 3, stride, 1));
        b.advance(b.conv(p + "conv2", planes, planes, 3, 1, 1));
      }
      in_planes = out_planes;
    }
  }
  b.layout.fc_in = in_planes;
  b.layout.fc_out = classes;
  return b.layout;
}

// Inference-time (re-parameterized) MobileOne-S0: every block is a 3x3
// depthwise conv followed by a 1x1 pointwise conv.
ConvNetLayout mobileone_s0_layout(std::size_t in_c, std::size_t height, std::size_t width, std::size_t classes) {
  LayoutBuilder b{{}, height, width};
  b.advance(b.conv("stage0", in_c, 48, 3, 2, 1));
  const std::size_t widths[] = {48, 128, 256, 1024};
  const int depths[] = {2, 8, 10, 1};
  std::size_t in_planes = 48;
  for (std::size_t stage = 0; stage < 4; ++stage) {
    for (int i = 0; i < depths[stage]; ++i) {
      const std::size_t stride = i == 0 ? 2 : 1;
      const std::string p = "stage" + std::to_string(stage + 1) + "." + std::to_string(i) + ".";
      b.advance(b.conv(p + "dw", in_planes, in_planes, 3, stride, 1, in_planes));
      b.advance(b.conv(p + "pw", in_planes, widths[stage], 1, 1, 0));
      in_planes = widths[stage];
    }
  }
  b.layout.fc_in = in_planes;
  b.layout.fc_out = classes;
  return b.layout;
}

}  // namespace

ConvNetLayout convnet_layout(const ModelSpec& spec) {
  spec.validate();
  if (spec.family != Family::ConvNet) throw SpecError("convnet_layout needs a convnet spec");
  const std::size_t h = spec.height();
  const std::size_t w = spec.width();
  if (spec.preset == "mobileone-s0") return mobileone_s0_layout(spec.in_channels, h, w, spec.num_classes);
  if (spec.preset.rfind("resnet", 0) == 0) {
    return resnet_layout(std::stoi(spec.preset.substr(6)), spec.in_channels, h, w, spec.num_classes);
  }
  // Custom proposal stack: "same"-style padding k/2, no classifier.
  LayoutBuilder b{{}, h, w};
  std::size_t in_c = spec.in_channels;
  for (std::size_t i = 0; i < spec.channels.size(); ++i) {
    const std::size_t k = spec.kernels[i];
    const std::size_t p = k / 2;
    if (b.h + 2 * p < k || b.w + 2 * p < k) throw SpecError("custom convnet: input too small for layer " +
                                                            std::to_string(i));
    b.advance(b.conv("conv" + std::to_string(i), in_c, spec.channels[i], k, spec.strides[i], p));
    in_c = spec.channels[i];
  }
  return b.layout;
}

FlopReport count_proposal(const ModelSpec& spec) {
  const ConvNetLayout layout = convnet_layout(spec);
  FlopReport r;
  r.model = spec.name.empty() ? spec.preset : spec.name;
  r.z = 1.0;
  for (const auto& c : layout.convs) push(r, c.name, OpKind::Conv, c.macs(), c.macs());
  if (layout.fc_out > 0) {
    const Macs fc = m(layout.fc_in) * m(layout.fc_out);
    push(r, "fc", OpKind::Head, fc, fc);
  }
  return r;
}

FlopReport count_model(const ModelSpec& spec, double z) {
  switch (spec.family) {
    case Family::TokenVit: return count_vit(spec, z);
    case Family::Hierarchical: return count_hier(spec, z);
    case Family::ConvNet: return count_proposal(spec);
  }
  throw SpecError("unknown family");
}

void attach_proposal(FlopReport& report, const FlopReport& proposal) {
  report.proposal = proposal.baseline_macs();
  report.proposal_model = proposal.model;
}

}  // namespace papr
