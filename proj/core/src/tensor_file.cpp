// SPDX-License-Identifier: Apache-2.0
#include "papr/io/tensor_file.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace papr::io {

namespace {

constexpr char kMagic[4] = {'P', 'T', 'S', 'R'};
constexpr std::size_t kHeaderFixed = 7;

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
  if (t.rank() == 0 || t.rank() > 255) throw IoError("tensor file: rank must be 1..255");
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderFixed + 8 * t.rank() + 4 * t.numel());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(kTensorFileVersion);
  out.push_back(kDtypeFloat32);
  out.push_back(static_cast<std::uint8_t>(t.rank()));
  for (auto d : t.dims()) put_u64(out, d);
  for (float v : t.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderFixed) throw IoError("tensor file: truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw IoError("tensor file: bad magic");
  if (bytes[4] != kTensorFileVersion) throw IoError("tensor file: unsupported version " + std::to_string(bytes[4]));
  if (bytes[5] != kDtypeFloat32) throw IoError("tensor file: unsupported dtype " + std::to_string(bytes[5]));
  const std::size_t ndim = bytes[6];
  if (ndim == 0) throw IoError("tensor file: ndim must be at least 1");
  if (bytes.size() < kHeaderFixed + 8 * ndim) throw IoError("tensor file: truncated extents");

  Dims dims(ndim);
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < ndim; ++i) {
    const std::uint64_t e = get_u64(bytes.data() + kHeaderFixed + 8 * i);
    if (e == 0) throw IoError("tensor file: zero extent on axis " + std::to_string(i));
    if (count > (std::uint64_t{1} << 40) / e) throw IoError("tensor file: extents too large");
    count *= e;
    dims[i] = static_cast<std::size_t>(e);
  }
  const std::size_t payload_at = kHeaderFixed + 8 * ndim;
  const std::size_t payload = bytes.size() - payload_at;
  if (payload < 4 * count) throw IoError("tensor file: truncated payload");
  if (payload > 4 * count) throw IoError("tensor file: trailing bytes after payload");

  std::vector<float> data(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = std::bit_cast<float>(get_u32(bytes.data() + payload_at + 4 * i));
    if (!std::isfinite(data[i])) throw IoError("tensor file: non-finite value at element " + std::to_string(i));
  }
  return Tensor(std::move(dims), std::move(data));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_tensor_file(const std::filesystem::path& path, const Tensor& t) {
  write_file_bytes(path, encode_tensor(t));
}

Tensor read_tensor_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_tensor(bytes);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace papr::io
