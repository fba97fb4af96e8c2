// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "papr/tensor.hpp"

namespace papr::io {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor container layout (all integers little-endian):
///
///   offset 0   "PTSR"
///   offset 4   u8 version = 1
///   offset 5   u8 dtype   = 0 (float32)
///   offset 6   u8 ndim    (>= 1)
///   offset 7   ndim x u64 extents
///   then       product(extents) x f32, row-major
inline constexpr std::uint8_t kTensorFileVersion = 1;
inline constexpr std::uint8_t kDtypeFloat32 = 0;

std::vector<std::uint8_t> encode_tensor(const Tensor& t);
Tensor decode_tensor(std::span<const std::uint8_t> bytes);

void write_tensor_file(const std::filesystem::path& path, const Tensor& t);
Tensor read_tensor_file(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace papr::io
