// SPDX-License-Identifier: Apache-2.0
#include "papr/io/netpbm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace papr::io {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t number(const char* what) {
    skip_space_and_comments();
    std::size_t v = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
      if (v > (std::size_t{1} << 24)) throw IoError(std::string("netpbm: ") + what + " too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw IoError(std::string("netpbm: malformed header, expected ") + what);
    return v;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw IoError("netpbm: malformed header, missing whitespace after maxval");
    }
    ++pos_;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Raster decode_netpbm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw IoError("netpbm: expected binary P5 or P6 magic");
  }
  Raster r;
  r.channels = bytes[1] == '6' ? 3 : 1;
  HeaderReader header(bytes);
  header.advance(2);
  r.width = header.number("width");
  r.height = header.number("height");
  const std::size_t maxval = header.number("maxval");
  header.single_whitespace();
  if (r.width == 0 || r.height == 0) throw IoError("netpbm: zero image extent");
  if (maxval == 0 || maxval > 255) throw IoError("netpbm: only 8-bit maxval (1..255) is supported");

  const std::size_t need = r.width * r.height * r.channels;
  if (bytes.size() - header.pos() < need) throw IoError("netpbm: truncated payload");
  const auto first = bytes.begin() + static_cast<std::ptrdiff_t>(header.pos());
  r.pixels.assign(first, first + static_cast<std::ptrdiff_t>(need));
  if (maxval != 255) {
    for (auto& p : r.pixels) {
      if (p > maxval) throw IoError("netpbm: sample exceeds maxval");
      p = static_cast<std::uint8_t>(std::lround(255.0 * p / static_cast<double>(maxval)));
    }
  }
  return r;
}

std::vector<std::uint8_t> encode_netpbm(const Raster& r) {
  if (r.channels != 1 && r.channels != 3) throw IoError("netpbm: raster must have 1 or 3 channels");
  if (r.pixels.size() != r.width * r.height * r.channels) throw IoError("netpbm: raster size mismatch");
  const std::string header = std::string(r.channels == 3 ? "P6" : "P5") + "\n" + std::to_string(r.width) + " " +
                             std::to_string(r.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), r.pixels.begin(), r.pixels.end());
  return out;
}

std::uint8_t quantize_unit(float v) {
  const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(255.0 * c + 0.5));
}

Tensor read_ppm(const std::filesystem::path& path) {
  const Raster r = decode_netpbm(read_file_bytes(path));
  if (r.channels != 3) throw IoError(path.string() + ": expected a P6 (colour) image");
  Tensor t({3, r.height, r.width});
  const std::size_t plane = r.height * r.width;
  for (std::size_t p = 0; p < plane; ++p) {
    for (std::size_t c = 0; c < 3; ++c) t[c * plane + p] = static_cast<float>(r.pixels[p * 3 + c]) / 255.0f;
  }
  return t;
}

void write_ppm(const std::filesystem::path& path, const Tensor& image) {
  require_rank(image, 3, "write_ppm");
  if (image.dim(0) != 3) throw IoError("write_ppm: expected 3 channels");
  Raster r{image.dim(2), image.dim(1), 3, {}};
  const std::size_t plane = r.height * r.width;
  r.pixels.resize(plane * 3);
  for (std::size_t p = 0; p < plane; ++p) {
    for (std::size_t c = 0; c < 3; ++c) r.pixels[p * 3 + c] = quantize_unit(image[c * plane + p]);
  }
  write_file_bytes(path, encode_netpbm(r));
}

Tensor read_pgm(const std::filesystem::path& path) {
  const Raster r = decode_netpbm(read_file_bytes(path));
  if (r.channels != 1) throw IoError(path.string() + ": expected a P5 (grey) image");
  Tensor t({r.height, r.width});
  for (std::size_t i = 0; i < r.pixels.size(); ++i) t[i] = static_cast<float>(r.pixels[i]) / 255.0f;
  return t;
}

void write_pgm(const std::filesystem::path& path, const Tensor& gray) {
  require_rank(gray, 2, "write_pgm");
  Raster r{gray.dim(1), gray.dim(0), 1, {}};
  r.pixels.resize(gray.numel());
  for (std::size_t i = 0; i < gray.numel(); ++i) r.pixels[i] = quantize_unit(gray[i]);
  write_file_bytes(path, encode_netpbm(r));
}

Raster heatmap_raster(const PatchSignificanceMap& normalized, std::size_t scale) {
  if (scale == 0) throw IoError("heatmap scale must be at least 1");
  const Tensor& v = normalized.values;
  if (v.rank() != 2 && v.rank() != 3) throw IoError("heatmap: PSM must be rank 2 or 3");
  const std::size_t frames = v.rank() == 3 ? v.dim(0) : 1;
  const std::size_t h = v.dims()[v.rank() - 2];
  const std::size_t w = v.dims().back();
  Raster r{w * scale, frames * h * scale, 1, {}};
  r.pixels.resize(r.width * r.height);
  for (std::size_t row = 0; row < r.height; ++row) {
    const std::size_t src_row = row / scale;  // frame-major: frame * h + y
    for (std::size_t col = 0; col < r.width; ++col) {
      r.pixels[row * r.width + col] = quantize_unit(v[src_row * w + col / scale]);
    }
  }
  return r;
}

void write_heatmap(const std::filesystem::path& path, const PatchSignificanceMap& normalized, std::size_t scale) {
  write_file_bytes(path, encode_netpbm(heatmap_raster(normalized, scale)));
}

}  // namespace papr::io
