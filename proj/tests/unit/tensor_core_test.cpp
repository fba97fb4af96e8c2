// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "papr/attention.hpp"
#include "papr/layers.hpp"
#include "papr/resize.hpp"

namespace papr {
namespace {

TEST(Tensor, RejectsZeroExtentAndSizeMismatch) {
  EXPECT_THROW(Tensor({2, 0}), TensorError);
  EXPECT_THROW(Tensor({2, 2}, std::vector<float>(3)), TensorError);
  Tensor t({2, 3}, 1.5f);
  EXPECT_EQ(t.numel(), 6u);
  EXPECT_THROW(t.at({2, 0}), TensorError);
  EXPECT_THROW(t.reshaped({4}), TensorError);
  EXPECT_EQ(t.reshaped({3, 2}).dims(), (Dims{3, 2}));
}

TEST(Rng, SameSeedSameStream) {
  Rng a(9), b(9);
  EXPECT_EQ(a.uniform_tensor({16}, -1, 1), b.uniform_tensor({16}, -1, 1));
}

TEST(Conv2d, OneByOneSingleChannel) {
  Conv2dLayer l{Tensor({1, 1, 1, 1}, 3.0f), Tensor({1}, 0.5f)};
  const Tensor y = conv2d(Tensor({1, 1, 1}, 2.0f), l);
  EXPECT_FLOAT_EQ(y[0], 6.5f);
}

TEST(Conv2d, MatchesLoopOracle) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t ci = 1 + rng.index(3), co = 1 + rng.index(4), k = 1 + rng.index(3);
    const std::size_t stride = 1 + rng.index(2), pad = rng.index(k);
    const std::size_t h = k + rng.index(6), w = k + rng.index(6);
    const Conv2dLayer l = Conv2dLayer::random(ci, co, k, stride, pad, rng);
    const Tensor x = oracle::random_tensor(rng, {ci, h, w});
    EXPECT_LE(max_abs_diff(conv2d(x, l), oracle::conv2d(x, l)), 1e-5f) << "trial " << trial;
  }
}

TEST(Conv2d, ChannelMismatchThrows) {
  Rng rng(2);
  const Conv2dLayer l = Conv2dLayer::random(3, 4, 3, 1, 1, rng);
  EXPECT_THROW(conv2d(Tensor({2, 5, 5}), l), TensorError);
}

TEST(Linear, MatchesLoopOracle) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t in = 1 + rng.index(12), out = 1 + rng.index(12), rows = 1 + rng.index(6);
    const LinearLayer l = LinearLayer::random(in, out, rng, trial % 2 == 0);
    const Tensor x = oracle::random_tensor(rng, {rows, in});
    EXPECT_LE(max_abs_diff(linear(x, l), oracle::linear(x, l)), 1e-5f);
  }
}

TEST(Linear, IdentityIsPassThrough) {
  Rng rng(4);
  const Tensor x = oracle::random_tensor(rng, {3, 5});
  EXPECT_EQ(linear(x, LinearLayer::identity(5)), x);
}

TEST(GlobalAvgPool, HandValues) {
  EXPECT_FLOAT_EQ(global_avg_pool(Tensor({1, 2, 2}, {1, 2, 3, 4}))[0], 2.5f);
  const Tensor c = global_avg_pool(Tensor({3, 4, 5}, -0.75f));
  for (float v : c.data()) EXPECT_FLOAT_EQ(v, -0.75f);
}

TEST(GlobalAvgPool, MatchesFlatSumOracle) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Tensor f = oracle::random_tensor(rng, {8, 7, 7});
    EXPECT_LE(max_abs_diff(global_avg_pool(f), oracle::global_avg_pool(f)), 1e-5f);
  }
}

TEST(Bicubic, KernelShape) {
  EXPECT_DOUBLE_EQ(cubic_kernel(0.0), 1.0);
  EXPECT_DOUBLE_EQ(cubic_kernel(1.0), 0.0);
  EXPECT_DOUBLE_EQ(cubic_kernel(2.0), 0.0);
  EXPECT_DOUBLE_EQ(cubic_kernel(0.5), cubic_kernel(-0.5));
  for (double t : {0.1, 0.25, 0.7}) {
    EXPECT_NEAR(cubic_kernel(t + 1) + cubic_kernel(t) + cubic_kernel(1 - t) + cubic_kernel(2 - t), 1.0, 1e-12);
  }
}

TEST(Bicubic, IdentitySizeIsBitExact) {
  Rng rng(6);
  const Tensor x = oracle::random_tensor(rng, {4, 4});
  EXPECT_EQ(bicubic_resize(x, 4, 4), x);
}

TEST(Bicubic, ConstantPreserved) {
  const Tensor c({3, 3}, 7.0f);
  for (auto [h, w] : {std::pair{1, 1}, {5, 2}, {14, 14}, {2, 9}}) {
    const Tensor y = bicubic_resize(c, h, w);
    for (float v : y.data()) EXPECT_EQ(v, 7.0f);
  }
}

TEST(Bicubic, CheckerboardMatchesPerPixelOracle) {
  const Tensor cb({2, 2}, {0, 1, 1, 0});
  EXPECT_LE(max_abs_diff(bicubic_resize(cb, 4, 4), oracle::bicubic(cb, 4, 4)), 1e-6f);
}

TEST(Bicubic, RandomMatchesPerPixelOracle) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t h = 1 + rng.index(9), w = 1 + rng.index(9);
    const std::size_t oh = 1 + rng.index(16), ow = 1 + rng.index(16);
    const Tensor x = oracle::random_tensor(rng, {h, w});
    EXPECT_LE(max_abs_diff(bicubic_resize(x, oh, ow), oracle::bicubic(x, oh, ow)), 1e-5f);
  }
}

TEST(Bicubic, MonotoneRampStaysMonotoneInInterior) {
  Tensor ramp({6, 6});
  for (std::size_t y = 0; y < 6; ++y)
    for (std::size_t x = 0; x < 6; ++x) ramp.at({y, x}) = static_cast<float>(x);
  const Tensor up = bicubic_resize(ramp, 6, 20);
  for (std::size_t y = 0; y < 6; ++y)
    for (std::size_t x = 3; x + 4 < 20; ++x) EXPECT_LE(up.at({y, x}), up.at({y, x + 1}));
}

TEST(Bicubic, RejectsZeroTarget) { EXPECT_THROW(bicubic_resize(Tensor({2, 2}), 0, 3), TensorError); }

TEST(Attention, SingleTokenAttendsToItself) {
  Rng rng(8);
  const AttentionBlock b = AttentionBlock::random(8, 2, 16, rng);
  const Tensor x = oracle::random_tensor(rng, {1, 8});
  // softmax over one key is 1, so the mixed vector is V of the token itself.
  const Tensor qkv = linear(layer_norm(x, b.norm1), b.qkv);
  Tensor v({1, 8});
  std::copy_n(qkv.data().begin() + 16, 8, v.data().begin());
  EXPECT_LE(max_abs_diff(multi_head_attention(layer_norm(x, b.norm1), b), linear(v, b.proj)), 1e-6f);
}

TEST(Attention, MatchesStraightLineOracle) {
  Rng rng(10);
  const AttentionBlock b = AttentionBlock::random(4, 2, 8, rng);
  const Tensor x = oracle::random_tensor(rng, {3, 4});
  EXPECT_LE(max_abs_diff(attention_forward(x, b), oracle::attention_block(x, b)), 1e-5f);
}

TEST(Attention, PermutationEquivariant) {
  Rng rng(11);
  const AttentionBlock b = AttentionBlock::random(16, 4, 32, rng);
  const std::size_t n = 9;
  const Tensor x = oracle::random_tensor(rng, {n, 16});
  const Tensor y = attention_forward(x, b);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    Tensor px({n, 16});
    for (std::size_t i = 0; i < n; ++i) std::copy_n(x.data().begin() + perm[i] * 16, 16, px.data().begin() + i * 16);
    const Tensor py = attention_forward(px, b);
    float worst = 0.0f;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < 16; ++c) worst = std::max(worst, std::abs(py[i * 16 + c] - y[perm[i] * 16 + c]));
    EXPECT_LE(worst, 1e-5f);
  }
}

TEST(Attention, DimMismatchThrows) {
  Rng rng(12);
  const AttentionBlock b = AttentionBlock::random(8, 2, 16, rng);
  EXPECT_THROW(attention_forward(Tensor({3, 6}), b), TensorError);
}

TEST(LayerNorm, RowsHaveZeroMeanUnitVariance) {
  Rng rng(13);
  const Tensor y = layer_norm(oracle::random_tensor(rng, {4, 32}), LayerNorm::identity(32));
  for (std::size_t r = 0; r < 4; ++r) {
    double m = 0, v = 0;
    for (std::size_t i = 0; i < 32; ++i) m += y[r * 32 + i];
    m /= 32;
    for (std::size_t i = 0; i < 32; ++i) v += (y[r * 32 + i] - m) * (y[r * 32 + i] - m);
    EXPECT_NEAR(m, 0.0, 1e-6);
    EXPECT_NEAR(v / 32, 1.0, 1e-3);
  }
}

}  // namespace
}  // namespace papr
