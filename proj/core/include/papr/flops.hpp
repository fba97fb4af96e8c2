// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "papr/model_spec.hpp"

namespace papr {

using Macs = std::uint64_t;

/// What a counted layer is, for grouping and pruning rules.
enum class OpKind {
  Embed,       // patch embedding / stem, always dense
  TokenLinear, // per-token linear in a ViT block, scales with N'
  TokenMix,    // attention scores / weighted values, scales with N'^2
  Pixel,       // hierarchical pixel operator, scales with kept pixels
  Spatial,     // hierarchical window / kernel operator, dense
  Transition,  // downsampling between stages, dense
  Conv,        // proposal ConvNet layer
  Head,        // classifier
};

std::string to_string(OpKind k);

struct FlopEntry {
  std::string name;
  OpKind kind = OpKind::Conv;
  Macs baseline = 0;
  Macs pruned = 0;
};

/// Multiply-accumulate ledger for one model at one keep ratio.
///
/// MACs are the primary unit. `flops` values are 2 x MACs. The GFLOPs
/// figures quoted by common model-zoo tables are produced by counters that
/// count one multiply-accumulate as one operation, so those figures are
/// compared against `gmacs`.
struct FlopReport {
  std::string model;
  double z = 1.0;
  std::size_t tokens_baseline = 0;
  std::size_t tokens_pruned = 0;
  std::vector<FlopEntry> entries;
  /// Proposal-network cost, paid only when pruning. Not part of the totals.
  Macs proposal = 0;
  std::string proposal_model;

  Macs baseline_macs() const;
  Macs pruned_macs() const;
  Macs pruned_macs_with_proposal() const { return pruned_macs() + proposal; }
  Macs baseline_macs(OpKind kind) const;
  Macs pruned_macs(OpKind kind) const;

  /// pruned / baseline over all entries.
  double reduction_ratio() const;
  /// pruned / baseline over block entries only (no embed, transition or head).
  double block_reduction_ratio() const;
  /// Share of baseline MACs spent in pixel operators.
  double pixel_share() const;

  static double giga(Macs m) { return static_cast<double>(m) * 1e-9; }
};

/// Token ViT, image or video (input rank picks the geometry). The patch
/// embedding runs before pruning and is counted dense.
FlopReport count_vit(const ModelSpec& spec, double z);

/// Video ViT: same block model, N = T/tubelet * H/k * W/k. Requires T,H,W input.
FlopReport count_video_vit(const ModelSpec& spec, double z);

/// Hierarchical backbone: pixel operators scale with the kept pixel count of
/// each stage grid, everything else stays dense.
FlopReport count_hier(const ModelSpec& spec, double z);

/// One convolution as counted by count_proposal.
struct ConvDesc {
  std::string name;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;
  std::size_t groups = 1;
  std::size_t in_h = 0;
  std::size_t in_w = 0;

  std::size_t out_h() const { return (in_h + 2 * padding - kernel) / stride + 1; }
  std::size_t out_w() const { return (in_w + 2 * padding - kernel) / stride + 1; }
  Macs macs() const;
};

struct ConvNetLayout {
  std::vector<ConvDesc> convs;
  std::size_t fc_in = 0;
  std::size_t fc_out = 0;
};

/// Layer list of a convnet spec (presets or custom stack).
ConvNetLayout convnet_layout(const ModelSpec& spec);

/// outC * h * w * (inC/groups) * kH * kW per conv, plus the FC classifier
/// when the layout has one.
FlopReport count_proposal(const ModelSpec& spec);

/// Dispatch on family (convnet specs count as proposals).
FlopReport count_model(const ModelSpec& spec, double z);

/// Record the proposal network's total under `report.proposal`.
void attach_proposal(FlopReport& report, const FlopReport& proposal);

}  // namespace papr
