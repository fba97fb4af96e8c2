// SPDX-License-Identifier: Apache-2.0
#include "papr/psm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "papr/resize.hpp"

namespace papr {

PatchGrid::PatchGrid(Dims extents) : extents_(std::move(extents)) {
  if (extents_.empty() || extents_.size() > 3) {
    throw TensorError("patch grid must have 1 to 3 axes, got " + dims_to_string(extents_));
  }
  for (auto e : extents_) {
    if (e == 0) throw TensorError("patch grid extents must be positive, got " + dims_to_string(extents_));
  }
}

std::string PatchGrid::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < extents_.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(extents_[i]);
  }
  return s;
}

ConvFeatureMap::ConvFeatureMap(Tensor features) : features_(std::move(features)) {
  if (features_.rank() != 3 && features_.rank() != 4) {
    throw TensorError("feature map must be [K,h,w] or [K,t,h,w], got " + dims_to_string(features_.dims()));
  }
}

std::vector<bool> PruneMask::keep_flags() const {
  std::vector<bool> flags(grid.n_patches(), false);
  for (auto i : kept) flags.at(i) = true;
  return flags;
}

std::vector<std::size_t> PruneMask::dropped() const {
  const auto flags = keep_flags();
  std::vector<std::size_t> out;
  out.reserve(flags.size() - kept.size());
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (!flags[i]) out.push_back(i);
  }
  return out;
}

std::size_t keep_count(double z, std::size_t n_patches) {
  if (!(z > 0.0 && z <= 1.0)) throw TensorError("keep ratio z must be in (0, 1], got " + std::to_string(z));
  if (n_patches == 0) throw TensorError("keep_count: empty patch grid");
  const auto k = static_cast<std::size_t>(std::floor(z * static_cast<double>(n_patches)));
  return std::max<std::size_t>(1, k);
}

RegionProposal region_proposal(const ConvFeatureMap& features) {
  const Tensor& f = features.features();
  const std::size_t k = f.dim(0);
  const std::size_t plane = f.numel() / k;
  Dims dims(f.dims().begin() + 1, f.dims().end());
  Tensor r(std::move(dims));
  for (std::size_t i = 0; i < plane; ++i) {
    float acc = 0.0f;
    for (std::size_t c = 0; c < k; ++c) acc += f[c * plane + i];
    r[i] = acc / static_cast<float>(k);
  }
  check_finite(r, "region_proposal");
  return {std::move(r)};
}

PatchSignificanceMap build_psm(const RegionProposal& proposal, const PatchGrid& grid) {
  const Tensor& r = proposal.values;
  if (grid.rank() != r.rank()) {
    throw TensorError("build_psm: grid " + grid.to_string() + " does not match proposal rank " +
                      std::to_string(r.rank()));
  }
  if (r.rank() == 2) {
    return {bicubic_resize(r, grid.extents()[0], grid.extents()[1]), grid};
  }
  if (r.rank() != 3) throw TensorError("build_psm: proposal must be rank 2 or 3");

  const Tensor timed = linear_resize_axis0(r, grid.extents()[0]);
  const std::size_t t = grid.extents()[0];
  const std::size_t h = grid.extents()[1];
  const std::size_t w = grid.extents()[2];
  const std::size_t src_h = timed.dim(1);
  const std::size_t src_w = timed.dim(2);
  Tensor out({t, h, w});
  for (std::size_t f = 0; f < t; ++f) {
    const auto first = timed.data().begin() + static_cast<std::ptrdiff_t>(f * src_h * src_w);
    Tensor frame({src_h, src_w}, std::vector<float>(first, first + static_cast<std::ptrdiff_t>(src_h * src_w)));
    const Tensor resized = bicubic_resize(frame, h, w);
    std::copy(resized.data().begin(), resized.data().end(),
              out.data().begin() + static_cast<std::ptrdiff_t>(f * h * w));
  }
  return {std::move(out), grid};
}

double percentile(std::span<const float> values, double pct) {
  if (values.empty()) throw TensorError("percentile of empty set");
  std::vector<float> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = std::clamp(pct, 0.0, 100.0) / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double t = pos - static_cast<double>(lo);
  return (1.0 - t) * sorted[lo] + t * sorted[hi];
}

PatchSignificanceMap normalize_psm(const PatchSignificanceMap& psm,
                                   std::optional<std::pair<double, double>> clip_percentiles) {
  const auto data = psm.values.data();
  double lo = 0.0;
  double hi = 0.0;
  if (clip_percentiles) {
    const auto [plo, phi] = *clip_percentiles;
    if (!(plo < phi)) throw TensorError("normalize_psm: clip percentiles require lo < hi");
    if (plo < 0.0 || phi > 100.0) throw TensorError("normalize_psm: clip percentiles must lie in [0, 100]");
    lo = percentile(data, plo);
    hi = percentile(data, phi);
  } else {
    const auto [mn, mx] = std::minmax_element(data.begin(), data.end());
    lo = *mn;
    hi = *mx;
  }
  PatchSignificanceMap out{Tensor::zeros(psm.values.dims()), psm.grid};
  if (!(hi > lo)) return out;
  const double range = hi - lo;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double v = std::clamp(static_cast<double>(data[i]), lo, hi);
    out.values[i] = static_cast<float>((v - lo) / range);
  }
  return out;
}

PruneMask build_mask(const PatchSignificanceMap& psm, double z) {
  const std::size_t n = psm.values.numel();
  if (n != psm.grid.n_patches()) throw TensorError("build_mask: map size does not match its grid");
  const std::size_t k = keep_count(z, n);
  const auto p = psm.values.data();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Ascending index order going in + stable sort = lowest index wins ties.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
  order.resize(k);
  return {std::move(order), z, psm.grid};
}

}  // namespace papr
