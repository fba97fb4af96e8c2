// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "papr/tensor.hpp"

namespace papr {

/// Geometry of the backbone's patch layout: (h', w') or (t', h', w').
class PatchGrid {
 public:
  PatchGrid() = default;
  explicit PatchGrid(Dims extents);

  const Dims& extents() const noexcept { return extents_; }
  std::size_t rank() const noexcept { return extents_.size(); }
  std::size_t n_patches() const noexcept { return dims_product(extents_); }
  std::string to_string() const;

  bool operator==(const PatchGrid&) const = default;

 private:
  Dims extents_;
};

/// Last-layer activations of the proposal network: [K, h, w] or [K, t, h, w].
class ConvFeatureMap {
 public:
  explicit ConvFeatureMap(Tensor features);
  const Tensor& features() const noexcept { return features_; }
  std::size_t channels() const { return features_.dim(0); }

 private:
  Tensor features_;
};

/// Channel-mean of the feature map: [h, w] or [t, h, w].
struct RegionProposal {
  Tensor values;
};

struct PatchSignificanceMap {
  Tensor values;
  PatchGrid grid;
};

/// Kept flat patch indices in descending significance order.
struct PruneMask {
  std::vector<std::size_t> kept;
  double z = 1.0;
  PatchGrid grid;

  std::size_t keep_count() const noexcept { return kept.size(); }
  /// Boolean keep-vector over the flat grid.
  std::vector<bool> keep_flags() const;
  /// Complement of `kept`, ascending.
  std::vector<std::size_t> dropped() const;
};

/// max(1, floor(z * n_patches)); throws unless 0 < z <= 1.
std::size_t keep_count(double z, std::size_t n_patches);

/// R(x, y) = (1/K) sum_k f_k(x, y).
RegionProposal region_proposal(const ConvFeatureMap& features);

/// Resample the proposal onto `grid`. Rank-3 proposals are resized along
/// time linearly, then each frame bicubically.
PatchSignificanceMap build_psm(const RegionProposal& proposal, const PatchGrid& grid);

/// Min-max normalization to [0, 1] for display, optionally after clipping
/// to the (lo, hi) percentiles. A constant map becomes all zeros.
PatchSignificanceMap normalize_psm(const PatchSignificanceMap& psm,
                                   std::optional<std::pair<double, double>> clip_percentiles = std::nullopt);

/// Percentile of `values` with linear interpolation between order statistics.
double percentile(std::span<const float> values, double pct);

/// Top-z selection: stable descending sort of the row-major flattened map,
/// ties resolved towards the lower flat index.
PruneMask build_mask(const PatchSignificanceMap& psm, double z);

}  // namespace papr
