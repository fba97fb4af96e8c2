// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "oracles.hpp"
#include "papr/proposal.hpp"
#include "papr/psm.hpp"
#include "papr/resize.hpp"

namespace papr {
namespace {

std::set<std::size_t> as_set(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

TEST(KeepCount, FloorWithFloorOfOne) {
  EXPECT_EQ(keep_count(0.5, 196), 98u);
  EXPECT_EQ(keep_count(0.45, 196), 88u);
  EXPECT_EQ(keep_count(0.001, 196), 1u);
  EXPECT_EQ(keep_count(1.0, 196), 196u);
  EXPECT_THROW(keep_count(0.0, 196), TensorError);
  EXPECT_THROW(keep_count(1.5, 196), TensorError);
}

TEST(RegionProposal, ChannelMean) {
  const Tensor f({2, 1, 2}, {1, 3, 5, 7});
  const RegionProposal r = region_proposal(ConvFeatureMap(f));
  EXPECT_EQ(r.values.dims(), (Dims{1, 2}));
  EXPECT_FLOAT_EQ(r.values[0], 3.0f);
  EXPECT_FLOAT_EQ(r.values[1], 5.0f);
}

TEST(RegionProposal, ChannelPermutationInvariant) {
  Rng rng(1);
  const Tensor f = oracle::random_tensor(rng, {6, 5, 4});
  Tensor g = f;
  const std::size_t plane = 20;
  std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
  for (std::size_t c = 0; c < 6; ++c) {
    std::copy_n(f.data().begin() + perm[c] * plane, plane, g.data().begin() + c * plane);
  }
  EXPECT_LE(max_abs_diff(region_proposal(ConvFeatureMap(f)).values, region_proposal(ConvFeatureMap(g)).values),
            1e-6f);
}

TEST(BuildPsm, ResizesToGrid) {
  Rng rng(2);
  const RegionProposal r{oracle::random_tensor(rng, {7, 7})};
  const auto psm = build_psm(r, PatchGrid({14, 14}));
  EXPECT_EQ(psm.values.dims(), (Dims{14, 14}));
  EXPECT_LE(max_abs_diff(psm.values, oracle::bicubic(r.values, 14, 14)), 1e-5f);
}

TEST(BuildPsm, VideoResizesTimeLinearlyThenSpace) {
  // Two frames, constant within each frame: 4 output slices interpolate linearly.
  Tensor r({2, 3, 3});
  std::fill_n(r.data().begin(), 9, 0.0f);
  std::fill_n(r.data().begin() + 9, 9, 4.0f);
  const auto psm = build_psm({r}, PatchGrid({4, 6, 6}));
  const float expect[4] = {0.0f, 1.0f, 3.0f, 4.0f};
  for (std::size_t t = 0; t < 4; ++t) EXPECT_NEAR(psm.values.at({t, 2, 3}), expect[t], 1e-6f);
}

TEST(BuildPsm, RankMismatchThrows) {
  EXPECT_THROW(build_psm({Tensor({3, 3})}, PatchGrid({2, 2, 2})), TensorError);
}

TEST(NormalizePsm, MinMax) {
  const PatchSignificanceMap p{Tensor({3}, {0, 5, 10}), PatchGrid({3})};
  const auto n = normalize_psm(p);
  EXPECT_FLOAT_EQ(n.values[0], 0.0f);
  EXPECT_FLOAT_EQ(n.values[1], 0.5f);
  EXPECT_FLOAT_EQ(n.values[2], 1.0f);
}

TEST(NormalizePsm, ConstantMapGoesToZero) {
  const auto n = normalize_psm({Tensor({2, 2}, 3.0f), PatchGrid({2, 2})});
  for (float v : n.values.data()) EXPECT_EQ(v, 0.0f);
}

TEST(NormalizePsm, PercentileClipAgainstSortOracle) {
  Tensor v({100});
  std::iota(v.data().begin(), v.data().end(), 0.0f);
  const auto n = normalize_psm({v, PatchGrid({100})}, std::pair{1.0, 99.0});
  // Linear-interpolated percentile over sorted values: rank p/100 * (n-1).
  const double lo = 0.99, hi = 98.01;
  EXPECT_EQ(n.values[0], 0.0f);
  EXPECT_EQ(n.values[99], 1.0f);
  for (std::size_t i = 1; i < 99; ++i) EXPECT_NEAR(n.values[i], (i - lo) / (hi - lo), 1e-5);
}

TEST(NormalizePsm, RangeAndIdempotence) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = normalize_psm(oracle::random_psm(rng, PatchGrid({6, 7})));
    for (float v : n.values.data()) {
      EXPECT_GE(v, 0.0f);
      EXPECT_LE(v, 1.0f);
    }
    EXPECT_LE(max_abs_diff(normalize_psm(n).values, n.values), 1e-6f);
  }
}

TEST(BuildMask, HandArgsort) {
  const PatchSignificanceMap p{Tensor({2, 2}, {4, 1, 3, 2}), PatchGrid({2, 2})};
  EXPECT_EQ(build_mask(p, 0.5).kept, (std::vector<std::size_t>{0, 2}));
}

TEST(BuildMask, TiesGoToLowestIndex) {
  const PatchSignificanceMap p{Tensor({2, 2}, 1.0f), PatchGrid({2, 2})};
  EXPECT_EQ(build_mask(p, 0.25).kept, (std::vector<std::size_t>{0}));
  EXPECT_EQ(build_mask(p, 1.0).kept, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(BuildMask, MatchesBruteForceTopK) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = oracle::random_psm(rng, PatchGrid({14, 14}));
    // Quantize so ties actually occur.
    for (auto& v : p.values.data()) v = std::round(v * 4.0f) / 4.0f;
    const auto mask = build_mask(p, 0.45);
    EXPECT_EQ(mask.kept, oracle::top_k(p.values.values(), 88));
  }
}

TEST(BuildMask, AffineRescaleInvariant) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = oracle::random_psm(rng, PatchGrid({8, 8}));
    const float a = rng.uniform(0.5f, 4.0f);
    const float b = rng.uniform(-2.0f, 2.0f);
    PatchSignificanceMap q = p;
    for (auto& v : q.values.data()) v = a * v + b;
    EXPECT_EQ(build_mask(p, 0.3).kept, build_mask(q, 0.3).kept);
  }
}

TEST(BuildMask, NestedInZ) {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = oracle::random_psm(rng, PatchGrid({9, 9}));
    const double z1 = rng.uniform(0.01f, 1.0f);
    const double z2 = rng.uniform(static_cast<float>(z1), 1.0f);
    const auto small = as_set(build_mask(p, z1).kept);
    const auto large = as_set(build_mask(p, z2).kept);
    EXPECT_TRUE(std::includes(large.begin(), large.end(), small.begin(), small.end()));
  }
}

TEST(BuildMask, KeptIsDescendingAndFlagsAgree) {
  Rng rng(7);
  const auto p = oracle::random_psm(rng, PatchGrid({5, 5}));
  const auto m = build_mask(p, 0.4);
  for (std::size_t i = 1; i < m.kept.size(); ++i) EXPECT_GE(p.values[m.kept[i - 1]], p.values[m.kept[i]]);
  const auto flags = m.keep_flags();
  EXPECT_EQ(static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true)), m.keep_count());
  EXPECT_EQ(m.dropped().size() + m.keep_count(), 25u);
}

TEST(ProposalNet, DownscaleAndShapes) {
  Rng rng(8);
  ProposalNet net{{Conv2dLayer::random(3, 4, 3, 2, 1, rng), Conv2dLayer::random(4, 6, 3, 2, 1, rng)}};
  EXPECT_EQ(net.downscale(), 4u);
  const auto f = net.forward(oracle::random_tensor(rng, {3, 32, 32}, 0, 1));
  EXPECT_EQ(f.features().dims(), (Dims{6, 8, 8}));
  for (float v : f.features().data()) EXPECT_GE(v, 0.0f);
  const auto clip = net.forward_clip(oracle::random_tensor(rng, {3, 3, 32, 32}, 0, 1));
  EXPECT_EQ(clip.features().dims(), (Dims{6, 3, 8, 8}));
}

}  // namespace
}  // namespace papr
