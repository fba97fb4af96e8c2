// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "papr/io/tensor_file.hpp"
#include "papr/psm.hpp"
#include "papr/tensor.hpp"

namespace papr::io {

/// 8-bit raster as stored in a binary PGM (1 channel) or PPM (3 channels),
/// interleaved, row-major.
struct Raster {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 1;
  std::vector<std::uint8_t> pixels;
};

/// Parse a P5 or P6 stream. maxval must be 1..255.
Raster decode_netpbm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_netpbm(const Raster& raster);

/// round(255 * v) with halves rounded up, v clamped to [0, 1].
std::uint8_t quantize_unit(float v);

/// P6 -> Tensor[3, H, W] with values in [0, 1].
Tensor read_ppm(const std::filesystem::path& path);
/// Tensor[3, H, W] -> P6, maxval 255.
void write_ppm(const std::filesystem::path& path, const Tensor& image);

/// P5 -> Tensor[H, W] with values in [0, 1].
Tensor read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Tensor& gray);

/// Normalized PSM -> P5 at grid resolution, each cell repeated `scale`
/// times along both axes. Rank-3 (video) maps are written with frames
/// stacked vertically.
Raster heatmap_raster(const PatchSignificanceMap& normalized, std::size_t scale = 1);
void write_heatmap(const std::filesystem::path& path, const PatchSignificanceMap& normalized, std::size_t scale = 1);

}  // namespace papr::io
