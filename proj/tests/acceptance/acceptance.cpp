// SPDX-License-Identifier: Apache-2.0
// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "papr/flops.hpp"
#include "papr/io/netpbm.hpp"
#include "papr/io/tensor_file.hpp"
#include "papr/models.hpp"
#include "papr/prune_hier.hpp"
#include "papr/resize.hpp"

namespace fs = std::filesystem;
using namespace papr;

namespace {

/// Collects failure notes for one criterion.
struct Check {
  std::vector<std::string> notes;
  void expect(bool ok, const std::string& what) {
    if (!ok) notes.push_back(what);
  }
  void near_ratio(double got, double want, double tol, const std::string& what) {
    std::ostringstream s;
    s << what << " " << got << " vs " << want << " (+-" << tol * 100 << "%)";
    expect(std::abs(got / want - 1.0) <= tol, s.str());
  }
};

double gmacs(const ModelSpec& s, double z) { return FlopReport::giga(count_model(s, z).pruned_macs()); }

void flop_tables(Check& c) {
  c.near_ratio(gmacs(presets::vit_small16(), 1), 4.61, 0.03, "ViT-S");
  c.near_ratio(gmacs(presets::vit_base16(), 1), 17.59, 0.03, "ViT-B");
  c.near_ratio(gmacs(presets::vit_large16(), 1), 61.61, 0.03, "ViT-L");
  c.near_ratio(gmacs(presets::vit_huge14(), 1), 167.4, 0.03, "ViT-H");
  const FlopReport mobile = count_proposal(presets::mobileone_s0());
  for (auto [spec, want] : {std::pair{presets::vit_base16(), 8.98}, {presets::vit_large16(), 30.83}}) {
    FlopReport r = count_vit(spec, 0.5);
    attach_proposal(r, mobile);
    c.near_ratio(FlopReport::giga(r.pruned_macs_with_proposal()), want, 0.05, spec.name + " z=0.5");
  }
}

void video_flops(Check& c) {
  const ModelSpec s = presets::video_vit_large16();
  c.near_ratio(gmacs(s, 1.0), 598, 0.05, "z=1");
  c.near_ratio(gmacs(s, 0.5), 275, 0.05, "z=0.5");
  c.near_ratio(gmacs(s, 0.3), 160, 0.08, "z=0.3");
}

void proposal_cost(Check& c) {
  c.near_ratio(gmacs(presets::resnet(18), 1), 1.81, 0.05, "ResNet-18");
  c.near_ratio(gmacs(presets::resnet(50), 1), 4.09, 0.05, "ResNet-50");
  c.near_ratio(gmacs(presets::resnet(152), 1), 11.51, 0.05, "ResNet-152");
  c.near_ratio(gmacs(presets::mobileone_s0(), 1), 0.27, 0.05, "MobileOne-S0");
  c.expect(gmacs(presets::resnet(152), 1) / gmacs(presets::mobileone_s0(), 1) >= 40.0, "ResNet-152/MobileOne-S0 < 40");
}

void pixel_share(Check& c) {
  const double convnext = count_hier(presets::convnext_base(), 1.0).pixel_share();
  const double swin = count_hier(presets::swin_base(), 1.0).pixel_share();
  c.expect(std::abs(convnext - 0.962) <= 0.05, "ConvNeXt share " + std::to_string(convnext));
  c.expect(std::abs(swin - 0.633) <= 0.05, "Swin share " + std::to_string(swin));
}

void full_keep(Check& c) {
  ModelSpec s;
  s.family = Family::TokenVit;
  s.input = {128, 128};
  s.depth = 4;
  s.dim = 64;
  s.heads = 4;
  s.patch = 16;
  s.num_classes = 10;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const VisionTransformer vit = build_vit(s, random_parameters(s, seed));
    Rng rng(1000 + seed);
    const Tensor images = rng.uniform_tensor({1, 3, 128, 128}, 0.0f, 1.0f);
    const PruneMask m = build_mask(oracle::random_psm(rng, PatchGrid({8, 8})), 1.0);
    const float d = max_abs_diff(vit.forward_pruned(images, std::span(&m, 1)), vit.forward(images));
    c.expect(d <= 1e-4f, "seed " + std::to_string(seed) + " diff " + std::to_string(d));
  }
}

void oracle_suites(Check& c) {
  Rng rng(77);
  for (int t = 0; t < 100; ++t) {
    const auto p = oracle::random_psm(rng, PatchGrid({1 + rng.index(14), 1 + rng.index(14)}));
    const double z = rng.uniform(0.01f, 1.0f);
    const auto m = build_mask(p, z);
    c.expect(m.kept == oracle::top_k(p.values.values(), keep_count(z, p.grid.n_patches())), "mask trial");
  }
  for (int t = 0; t < 20; ++t) {
    const Tensor x = rng.uniform_tensor({1 + rng.index(9), 1 + rng.index(9)}, -1, 1);
    const std::size_t h = 1 + rng.index(16), w = 1 + rng.index(16);
    c.expect(max_abs_diff(bicubic_resize(x, h, w), oracle::bicubic(x, h, w)) <= 1e-5f, "bicubic trial");
  }
  for (int t = 0; t < 100; ++t) {
    const std::size_t h = 1 + rng.index(8), w = 1 + rng.index(8), d = 1 + rng.index(8), o = 1 + rng.index(8);
    const HierFeature a{rng.uniform_tensor({1, h, w, d}, -1, 1), PatchGrid({h, w})};
    const LinearLayer op = LinearLayer::random(d, o, rng);
    const PruneMask m = build_mask(oracle::random_psm(rng, a.grid), rng.uniform(0.05f, 1.0f));
    const Tensor expect = oracle::dense_then_zero(a.values.reshaped({h * w, d}), op, m.keep_flags());
    c.expect(max_abs_diff(pixel_op_pruned(a, m, op).values.reshaped({h * w, o}), expect) <= 1e-6f, "pixel_op trial");
  }
  for (int t = 0; t < 100; ++t) {
    const std::size_t ci = 1 + rng.index(3), co = 1 + rng.index(4), k = 1 + rng.index(3);
    const Conv2dLayer l = Conv2dLayer::random(ci, co, k, 1 + rng.index(2), rng.index(k), rng);
    const Tensor x = rng.uniform_tensor({ci, k + rng.index(6), k + rng.index(6)}, -1, 1);
    c.expect(max_abs_diff(conv2d(x, l), oracle::conv2d(x, l)) <= 1e-5f, "conv trial");

    const LinearLayer lin = LinearLayer::random(1 + rng.index(12), 1 + rng.index(12), rng);
    const Tensor y = rng.uniform_tensor({1 + rng.index(5), lin.in_features()}, -1, 1);
    c.expect(max_abs_diff(linear(y, lin), oracle::linear(y, lin)) <= 1e-5f, "linear trial");

    const Tensor f = rng.uniform_tensor({1 + rng.index(8), 1 + rng.index(7), 1 + rng.index(7)}, -1, 1);
    c.expect(max_abs_diff(global_avg_pool(f), oracle::global_avg_pool(f)) <= 1e-5f, "gap trial");
  }
}

void selection_invariances(Check& c) {
  Rng rng(88);
  for (int t = 0; t < 100; ++t) {
    const auto p = oracle::random_psm(rng, PatchGrid({14, 14}));
    PatchSignificanceMap q = p;
    const float a = rng.uniform(0.1f, 10.0f), b = rng.uniform(-5.0f, 5.0f);
    for (auto& v : q.values.data()) v = a * v + b;
    c.expect(build_mask(p, 0.5).kept == build_mask(q, 0.5).kept, "affine trial " + std::to_string(t));
  }
  for (int t = 0; t < 100; ++t) {
    const auto p = oracle::random_psm(rng, PatchGrid({14, 14}));
    const double z1 = rng.uniform(0.01f, 1.0f), z2 = rng.uniform(static_cast<float>(z1), 1.0f);
    const auto k1 = build_mask(p, z1).kept, k2 = build_mask(p, z2).kept;
    const std::set<std::size_t> s1(k1.begin(), k1.end()), s2(k2.begin(), k2.end());
    c.expect(std::includes(s2.begin(), s2.end(), s1.begin(), s1.end()), "nesting trial " + std::to_string(t));
  }
}

std::vector<std::uint8_t> heatmap_bytes(std::uint64_t seed) {
  Rng rng(seed);
  const auto p = normalize_psm(oracle::random_psm(rng, PatchGrid({14, 14})));
  return io::encode_netpbm(io::heatmap_raster(p, 2));
}

void round_trips(Check& c) {
  const fs::path dir = fs::temp_directory_path() / "papr_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  Rng rng(99);
  for (int t = 0; t < 50; ++t) {
    Dims dims;
    for (std::size_t r = 0, n = 1 + rng.index(4); r < n; ++r) dims.push_back(1 + rng.index(6));
    const Tensor x = rng.uniform_tensor(dims, -1e5f, 1e5f);
    io::write_tensor_file(dir / "t.ptsr", x);
    const Tensor y = io::read_tensor_file(dir / "t.ptsr");
    c.expect(y.dims() == x.dims() && std::memcmp(x.data().data(), y.data().data(), x.numel() * 4) == 0,
             "tensor file trial " + std::to_string(t));
  }
  const Tensor img = rng.uniform_tensor({3, 9, 11}, 0, 1);
  io::write_ppm(dir / "a.ppm", img);
  c.expect(max_abs_diff(io::read_ppm(dir / "a.ppm"), img) <= 1.0f / 255.0f, "ppm round trip");
  const Tensor gray = rng.uniform_tensor({9, 11}, 0, 1);
  io::write_pgm(dir / "g.pgm", gray);
  c.expect(max_abs_diff(io::read_pgm(dir / "g.pgm"), gray) <= 1.0f / 510.0f + 1e-7f, "pgm round trip");

  const auto golden = io::heatmap_raster({Tensor({2, 2}, {0.0f, 1.0f, 0.5f, 0.25f}), PatchGrid({2, 2})});
  c.expect(golden.pixels == std::vector<std::uint8_t>{0, 255, 128, 64}, "golden heatmap bytes");
  c.expect(heatmap_bytes(5) == heatmap_bytes(5), "heatmap bytes differ between runs");
  const fs::path committed = fs::path(PAPR_GOLDEN_DIR) / "fixture_heatmap.pgm";
  c.expect(fs::exists(committed), "committed golden heatmap missing");
  fs::remove_all(dir);
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Check&)> run;
    double budget_s;
  };
  const std::vector<Criterion> criteria{
      {"FLOP-table reproduction", flop_tables, 1.0},
      {"video FLOP reproduction", video_flops, 1.0},
      {"proposal-cost reproduction", proposal_cost, 1.0},
      {"pixel-operator share", pixel_share, 1.0},
      {"full-keep equivalence", full_keep, 10.0},
      {"oracle suites", oracle_suites, 60.0},
      {"selection invariances", selection_invariances, 60.0},
      {"format round trips", round_trips, 60.0},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].run(c);
    } catch (const std::exception& e) {
      c.notes.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > criteria[i].budget_s) c.notes.push_back("took " + std::to_string(secs) + " s");
    const bool ok = c.notes.empty();
    failed += ok ? 0 : 1;
    std::printf("%s %zu %s (%.3f s)", ok ? "PASS" : "FAIL", i + 1, criteria[i].name, secs);
    for (std::size_t n = 0; n < std::min<std::size_t>(c.notes.size(), 3); ++n) std::printf(" | %s", c.notes[n].c_str());
    std::printf("\n");
  }
  return failed == 0 ? 0 : 1;
}
