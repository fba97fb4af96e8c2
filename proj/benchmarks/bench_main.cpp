// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "papr/layers.hpp"
#include "papr/models.hpp"
#include "papr/psm.hpp"
#include "papr/resize.hpp"

namespace {

using namespace papr;

void BM_BicubicUpsample(benchmark::State& state) {
  Rng rng(1);
  const Tensor src = rng.uniform_tensor({7, 7}, -1, 1);
  const auto side = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bicubic_resize(src, side, side));
}
BENCHMARK(BM_BicubicUpsample)->Arg(14)->Arg(56)->Arg(224);

void BM_BuildMask(benchmark::State& state) {
  Rng rng(2);
  const auto side = static_cast<std::size_t>(state.range(0));
  const PatchSignificanceMap psm{rng.uniform_tensor({side, side}, 0, 1), PatchGrid({side, side})};
  for (auto _ : state) benchmark::DoNotOptimize(build_mask(psm, 0.5));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side));
}
BENCHMARK(BM_BuildMask)->Arg(14)->Arg(56);

void BM_Conv2d(benchmark::State& state) {
  Rng rng(3);
  const auto side = static_cast<std::size_t>(state.range(0));
  const Conv2dLayer l = Conv2dLayer::random(16, 32, 3, 1, 1, rng);
  const Tensor x = rng.uniform_tensor({16, side, side}, -1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(conv2d(x, l));
}
BENCHMARK(BM_Conv2d)->Arg(16)->Arg(32);

// Same toy ViT dense and pruned at several keep ratios.
void BM_ToyVit(benchmark::State& state) {
  ModelSpec s;
  s.family = Family::TokenVit;
  s.input = {224, 224};
  s.depth = 4;
  s.dim = 192;
  s.heads = 3;
  s.patch = 16;
  s.num_classes = 10;
  const VisionTransformer vit = build_vit(s, random_parameters(s, 4));
  Rng rng(5);
  const Tensor images = rng.uniform_tensor({1, 3, 224, 224}, 0, 1);
  const double z = static_cast<double>(state.range(0)) / 100.0;
  const PruneMask mask = build_mask({rng.uniform_tensor({14, 14}, 0, 1), PatchGrid({14, 14})}, z);
  for (auto _ : state) {
    if (state.range(0) == 100) {
      benchmark::DoNotOptimize(vit.forward(images));
    } else {
      benchmark::DoNotOptimize(vit.forward_pruned(images, std::span(&mask, 1)));
    }
  }
  state.SetLabel("z=" + std::to_string(z).substr(0, 4));
}
BENCHMARK(BM_ToyVit)->Arg(100)->Arg(70)->Arg(50)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
