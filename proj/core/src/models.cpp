// SPDX-License-Identifier: Apache-2.0
#include "papr/models.hpp"

#include <cmath>

namespace papr {

namespace {

void linear_params(std::vector<ParamDesc>& out, const std::string& p, std::size_t in, std::size_t n_out) {
  out.push_back({p + ".weight", {n_out, in}, InitKind::Uniform, in});
  out.push_back({p + ".bias", {n_out}, InitKind::Uniform, in});
}

void norm_params(std::vector<ParamDesc>& out, const std::string& p, std::size_t n) {
  out.push_back({p + ".weight", {n}, InitKind::Ones, 1});
  out.push_back({p + ".bias", {n}, InitKind::Zeros, 1});
}

void conv_params(std::vector<ParamDesc>& out, const std::string& p, std::size_t in_c, std::size_t out_c,
                 std::size_t k) {
  out.push_back({p + ".weight", {out_c, in_c, k, k}, InitKind::Uniform, in_c * k * k});
  out.push_back({p + ".bias", {out_c}, InitKind::Uniform, in_c * k * k});
}

const Tensor& param(const ParameterSet& params, const std::string& name) {
  const auto it = params.find(name);
  if (it == params.end()) throw SpecError("missing parameter '" + name + "'");
  return it->second;
}

LinearLayer linear_from(const ParameterSet& params, const std::string& p) {
  return {param(params, p + ".weight"), param(params, p + ".bias")};
}

LayerNorm norm_from(const ParameterSet& params, const std::string& p) {
  return {param(params, p + ".weight"), param(params, p + ".bias"), 1e-6f};
}

Conv2dLayer conv_from(const ParameterSet& params, const std::string& p, std::size_t stride, std::size_t pad) {
  Conv2dLayer c;
  c.weight = param(params, p + ".weight");
  c.bias = param(params, p + ".bias");
  c.stride = {stride, stride};
  c.padding = {pad, pad};
  return c;
}

}  // namespace

std::vector<ParamDesc> parameter_layout(const ModelSpec& spec) {
  spec.validate();
  std::vector<ParamDesc> out;
  switch (spec.family) {
    case Family::TokenVit: {
      if (spec.is_video()) throw SpecError("video token models are FLOP-count only; no runtime parameters");
      const std::size_t d = spec.dim;
      const std::size_t n = dims_product(token_grid(spec)) + (spec.class_token ? 1 : 0);
      conv_params(out, "patch_embed", spec.in_channels, d, spec.patch);
      if (spec.class_token) out.push_back({"cls_token", {d}, InitKind::Uniform, d});
      out.push_back({"pos_embed", {n, d}, InitKind::Uniform, d});
      for (std::size_t l = 0; l < spec.depth; ++l) {
        const std::string p = "blocks." + std::to_string(l) + ".";
        norm_params(out, p + "norm1", d);
        linear_params(out, p + "attn.qkv", d, 3 * d);
        linear_params(out, p + "attn.proj", d, d);
        norm_params(out, p + "norm2", d);
        linear_params(out, p + "mlp.fc1", d, spec.mlp_hidden());
        linear_params(out, p + "mlp.fc2", spec.mlp_hidden(), d);
      }
      norm_params(out, "norm", d);
      linear_params(out, "head", d, spec.num_classes);
      break;
    }
    case Family::Hierarchical: {
      if (spec.block != HierBlockKind::ConvNeXt) {
        throw SpecError("only convnext hierarchical blocks are runnable; swin is FLOP-count only");
      }
      conv_params(out, "stem", spec.in_channels, spec.stage_dims[0], spec.patch);
      norm_params(out, "stem_norm", spec.stage_dims[0]);
      for (std::size_t s = 0; s < spec.stage_dims.size(); ++s) {
        const std::size_t d = spec.stage_dims[s];
        const std::string sp = "stages." + std::to_string(s) + ".";
        if (s > 0) conv_params(out, sp + "downsample", spec.stage_dims[s - 1], d, 2);
        for (std::size_t b = 0; b < spec.stage_depths[s]; ++b) {
          const std::string p = sp + "blocks." + std::to_string(b) + ".";
          out.push_back({p + "dwconv.weight", {d, spec.kernel, spec.kernel}, InitKind::Uniform,
                         spec.kernel * spec.kernel});
          out.push_back({p + "dwconv.bias", {d}, InitKind::Uniform, spec.kernel * spec.kernel});
          norm_params(out, p + "norm", d);
          linear_params(out, p + "pw1", d, spec.mlp_hidden(d));
          linear_params(out, p + "pw2", spec.mlp_hidden(d), d);
        }
      }
      norm_params(out, "norm", spec.stage_dims.back());
      linear_params(out, "head", spec.stage_dims.back(), spec.num_classes);
      break;
    }
    case Family::ConvNet: {
      if (spec.preset != "custom") {
        throw SpecError("convnet preset '" + spec.preset + "' is FLOP-count only; use a custom stack to run it");
      }
      std::size_t in_c = spec.in_channels;
      for (std::size_t i = 0; i < spec.channels.size(); ++i) {
        conv_params(out, "conv" + std::to_string(i), in_c, spec.channels[i], spec.kernels[i]);
        in_c = spec.channels[i];
      }
      break;
    }
  }
  return out;
}

ParameterSet random_parameters(const ModelSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  ParameterSet params;
  for (const auto& p : parameter_layout(spec)) {
    switch (p.init) {
      case InitKind::Ones: params.emplace(p.name, Tensor::full(p.dims, 1.0f)); break;
      case InitKind::Zeros: params.emplace(p.name, Tensor::zeros(p.dims)); break;
      case InitKind::Uniform: {
        const float s = 1.0f / std::sqrt(static_cast<float>(p.fan_in));
        params.emplace(p.name, rng.uniform_tensor(p.dims, -s, s));
        break;
      }
    }
  }
  return params;
}

void check_parameters(const ModelSpec& spec, const ParameterSet& params) {
  const auto layout = parameter_layout(spec);
  for (const auto& p : layout) {
    const Tensor& t = param(params, p.name);
    if (t.dims() != p.dims) {
      throw SpecError("parameter '" + p.name + "' has shape " + dims_to_string(t.dims()) + ", expected " +
                      dims_to_string(p.dims));
    }
  }
  if (params.size() != layout.size()) {
    for (const auto& [name, t] : params) {
      bool known = false;
      for (const auto& p : layout) known = known || p.name == name;
      if (!known) throw SpecError("unexpected parameter '" + name + "'");
    }
  }
}

VisionTransformer build_vit(const ModelSpec& spec, const ParameterSet& params) {
  check_parameters(spec, params);
  if (spec.family != Family::TokenVit) throw SpecError("build_vit needs a token-vit spec");
  VisionTransformer vit;
  vit.patch = spec.patch;
  vit.patch_embed = conv_from(params, "patch_embed", spec.patch, 0);
  if (spec.class_token) vit.class_token = param(params, "cls_token");
  vit.pos_embed = param(params, "pos_embed");
  for (std::size_t l = 0; l < spec.depth; ++l) {
    const std::string p = "blocks." + std::to_string(l) + ".";
    AttentionBlock b;
    b.dim = spec.dim;
    b.heads = spec.heads;
    b.norm1 = norm_from(params, p + "norm1");
    b.qkv = linear_from(params, p + "attn.qkv");
    b.proj = linear_from(params, p + "attn.proj");
    b.norm2 = norm_from(params, p + "norm2");
    b.fc1 = linear_from(params, p + "mlp.fc1");
    b.fc2 = linear_from(params, p + "mlp.fc2");
    b.validate();
    vit.blocks.push_back(std::move(b));
  }
  vit.head = ClassifierHead(norm_from(params, "norm"), linear_from(params, "head"));
  return vit;
}

HierarchicalNet build_hierarchical(const ModelSpec& spec, const ParameterSet& params) {
  check_parameters(spec, params);
  HierarchicalNet net;
  net.stem = conv_from(params, "stem", spec.patch, 0);
  net.stem_norm = norm_from(params, "stem_norm");
  for (std::size_t s = 0; s < spec.stage_dims.size(); ++s) {
    const std::string sp = "stages." + std::to_string(s) + ".";
    HierStage stage;
    if (s > 0) stage.downsample = conv_from(params, sp + "downsample", 2, 0);
    for (std::size_t b = 0; b < spec.stage_depths[s]; ++b) {
      const std::string p = sp + "blocks." + std::to_string(b) + ".";
      HierBlock block;
      block.spatial = DepthwiseConv{param(params, p + "dwconv.weight"), param(params, p + "dwconv.bias")};
      block.norm = norm_from(params, p + "norm");
      block.pixel_ops = {linear_from(params, p + "pw1"), linear_from(params, p + "pw2")};
      stage.blocks.push_back(std::move(block));
    }
    net.stages.push_back(std::move(stage));
  }
  net.norm = norm_from(params, "norm");
  net.head = linear_from(params, "head");
  return net;
}

ProposalNet build_proposal(const ModelSpec& spec, const ParameterSet& params) {
  check_parameters(spec, params);
  ProposalNet net;
  for (std::size_t i = 0; i < spec.channels.size(); ++i) {
    net.layers.push_back(conv_from(params, "conv" + std::to_string(i), spec.strides[i], spec.kernels[i] / 2));
  }
  return net;
}

}  // namespace papr
