// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "papr/flops.hpp"
#include "papr/models.hpp"
#include "papr/prune_hier.hpp"

namespace papr {
namespace {

HierFeature random_feature(Rng& rng, std::size_t b, std::size_t h, std::size_t w, std::size_t d) {
  return {oracle::random_tensor(rng, {b, h, w, d}), PatchGrid({h, w})};
}

float max_row_abs(const Tensor& v, std::size_t r, std::size_t d) {
  float m = 0.0f;
  for (std::size_t c = 0; c < d; ++c) m = std::max(m, std::abs(v[r * d + c]));
  return m;
}

TEST(Split, HandPartition) {
  Rng rng(1);
  const HierFeature a = random_feature(rng, 1, 2, 2, 3);
  const PruneMask m{{3}, 0.25, a.grid};
  const SplitResult s = split(a, m);
  EXPECT_EQ(s.foreground.dims(), (Dims{1, 1, 3}));
  EXPECT_TRUE(std::equal(s.foreground.data().begin(), s.foreground.data().end(), a.values.data().begin() + 9));
  EXPECT_EQ(s.background, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Split, FullKeepHasNoBackground) {
  Rng rng(2);
  const HierFeature a = random_feature(rng, 1, 3, 3, 2);
  const auto s = split(a, build_mask(oracle::random_psm(rng, a.grid), 1.0));
  EXPECT_TRUE(s.background.empty());
  auto x = s.foreground.values();
  auto y = a.values.values();
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  EXPECT_EQ(x, y);
}

TEST(Split, MatchesBooleanPartitionOracle) {
  Rng rng(3);
  const HierFeature a = random_feature(rng, 1, 14, 14, 4);
  const PruneMask m = build_mask(oracle::random_psm(rng, a.grid), 0.65);
  const auto s = split(a, m);
  const auto flags = m.keep_flags();
  std::vector<bool> dropped(flags.size());
  std::transform(flags.begin(), flags.end(), dropped.begin(), [](bool f) { return !f; });
  EXPECT_EQ(s.background, oracle::kept_rows(dropped));
  for (std::size_t j = 0; j < m.keep_count(); ++j) {
    EXPECT_TRUE(std::equal(s.foreground.data().begin() + j * 4, s.foreground.data().begin() + (j + 1) * 4,
                           a.values.data().begin() + m.kept[j] * 4));
  }
}

TEST(Reassemble, InvertsSplitOnForeground) {
  Rng rng(4);
  const HierFeature a = random_feature(rng, 2, 5, 5, 3);
  const PruneMask m = build_mask(oracle::random_psm(rng, a.grid), 0.4);
  const HierFeature r = reassemble(split(a, m).foreground, m);
  const auto flags = m.keep_flags();
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t p = 0; p < 25; ++p)
      for (std::size_t c = 0; c < 3; ++c) {
        const std::size_t i = (b * 25 + p) * 3 + c;
        EXPECT_EQ(r.values[i], flags[p] ? a.values[i] : 0.0f);
      }
}

TEST(PixelOpPruned, FullKeepEqualsDense) {
  Rng rng(5);
  const HierFeature a = random_feature(rng, 1, 4, 4, 6);
  const LinearLayer op = LinearLayer::random(6, 5, rng);
  const auto y = pixel_op_pruned(a, build_mask(oracle::random_psm(rng, a.grid), 1.0), op);
  EXPECT_LE(max_abs_diff(y.values, linear(a.values, op)), 1e-6f);
}

TEST(PixelOpPruned, IdentityKeepsOneRow) {
  const HierFeature a{Tensor({1, 2, 2, 2}, {1, 2, 3, 4, 5, 6, 7, 8}), PatchGrid({2, 2})};
  const auto y = pixel_op_pruned(a, PruneMask{{0}, 0.25, a.grid}, LinearLayer::identity(2));
  EXPECT_EQ(y.values.values(), (std::vector<float>{1, 2, 0, 0, 0, 0, 0, 0}));
}

TEST(PixelOpPruned, MatchesDenseThenZeroOracle) {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t h = 1 + rng.index(8), w = 1 + rng.index(8), d = 1 + rng.index(8), o = 1 + rng.index(8);
    const HierFeature a = random_feature(rng, 1, h, w, d);
    const LinearLayer op = LinearLayer::random(d, o, rng);
    const PruneMask m = build_mask(oracle::random_psm(rng, a.grid), rng.uniform(0.05f, 1.0f));
    const auto y = pixel_op_pruned(a, m, op);
    const Tensor flat = a.values.reshaped({h * w, d});
    const Tensor expect = oracle::dense_then_zero(flat, op, m.keep_flags());
    ASSERT_LE(max_abs_diff(y.values.reshaped({h * w, o}), expect), 1e-6f);
    for (auto r : m.dropped()) ASSERT_EQ(max_row_abs(y.values, r, o), 0.0f);
  }
}

HierBlock random_block(Rng& rng, std::size_t d) {
  HierBlock b;
  b.spatial = DepthwiseConv::random(d, 3, rng);
  b.norm = LayerNorm::identity(d);
  b.pixel_ops = {LinearLayer::random(d, 4 * d, rng), LinearLayer::random(4 * d, d, rng)};
  return b;
}

TEST(HierBlock, FullKeepEqualsDense) {
  Rng rng(7);
  const HierFeature a = random_feature(rng, 1, 6, 6, 4);
  const HierBlock b = random_block(rng, 4);
  const auto m = build_mask(oracle::random_psm(rng, a.grid), 1.0);
  EXPECT_LE(max_abs_diff(hier_block_forward(a, b, m).values, hier_block_forward_dense(a, b).values), 1e-5f);
}

TEST(HierBlock, MatchesStraightLineWithZeroedBackground) {
  Rng rng(8);
  const std::size_t d = 3, h = 4, w = 4;
  const HierFeature a = random_feature(rng, 1, h, w, d);
  const HierBlock b = random_block(rng, d);
  const auto m = build_mask(oracle::random_psm(rng, a.grid), 0.5);
  const auto flags = m.keep_flags();

  // Dense spatial op and norm, then each pixel op on every row with background rows zeroed.
  const Tensor s = b.spatial(a).values.reshaped({h * w, d});
  const Tensor n = layer_norm(s, b.norm);
  Tensor hid = oracle::dense_then_zero(n, b.pixel_ops[0], flags);
  for (auto& v : hid.data()) v = 0.5f * v * (1.0f + std::erf(v / std::sqrt(2.0f)));
  const Tensor out = oracle::dense_then_zero(hid, b.pixel_ops[1], flags);
  Tensor expect = a.values.reshaped({h * w, d});
  for (std::size_t i = 0; i < expect.numel(); ++i) expect[i] += out[i];

  EXPECT_LE(max_abs_diff(hier_block_forward(a, b, m).values.reshaped({h * w, d}), expect), 1e-5f);
}

TEST(HierBlock, GridMismatchThrows) {
  Rng rng(9);
  const HierFeature a = random_feature(rng, 1, 4, 4, 2);
  const HierBlock b = random_block(rng, 2);
  EXPECT_THROW(hier_block_forward(a, b, PruneMask{{0}, 0.1, PatchGrid({2, 2})}), TensorError);
}

TEST(HierarchicalNet, FullKeepMatchesDenseAndPruningChangesLogits) {
  ModelSpec spec;
  spec.family = Family::Hierarchical;
  spec.block = HierBlockKind::ConvNeXt;
  spec.input = {32, 32};
  spec.patch = 4;
  spec.stage_dims = {8, 16};
  spec.stage_depths = {1, 1};
  spec.kernel = 3;
  spec.num_classes = 5;
  const HierarchicalNet net = build_hierarchical(spec, random_parameters(spec, 3));
  Rng rng(10);
  const Tensor image = oracle::random_tensor(rng, {3, 32, 32}, 0, 1);
  const RegionProposal rp{oracle::random_tensor(rng, {4, 4})};
  const Tensor dense = net.forward(image);
  EXPECT_LE(max_abs_diff(net.forward_pruned(image, rp, 1.0), dense), 1e-5f);
  EXPECT_GT(max_abs_diff(net.forward_pruned(image, rp, 0.25), dense), 0.0f);
  const auto grids = net.stage_grids(32, 32);
  ASSERT_EQ(grids.size(), 2u);
  EXPECT_EQ(grids[0], PatchGrid({8, 8}));
  EXPECT_EQ(grids[1], PatchGrid({4, 4}));
}

TEST(HierBlock, PixelOpsDominateConvNeXtBlockCost) {
  const FlopReport r = count_hier(presets::convnext_base(), 1.0);
  const double block = static_cast<double>(r.baseline_macs(OpKind::Pixel) + r.baseline_macs(OpKind::Spatial));
  EXPECT_GE(static_cast<double>(r.baseline_macs(OpKind::Pixel)) / block, 0.60);
}

}  // namespace
}  // namespace papr
