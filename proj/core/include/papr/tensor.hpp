// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace papr {

using Dims = std::vector<std::size_t>;

/// Raised on any contract violation in the numeric substrate: shape
/// mismatches, invalid layer geometry, non-finite results.
class TensorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::size_t dims_product(std::span<const std::size_t> dims);
std::string dims_to_string(std::span<const std::size_t> dims);

/// Dense row-major float32 tensor. Value type; copies are deep.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Dims dims, float fill = 0.0f);
  Tensor(Dims dims, std::vector<float> data);

  static Tensor zeros(Dims dims) { return Tensor(std::move(dims), 0.0f); }
  static Tensor full(Dims dims, float value) { return Tensor(std::move(dims), value); }

  const Dims& dims() const noexcept { return dims_; }
  std::size_t rank() const noexcept { return dims_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }
  const std::vector<float>& values() const noexcept { return data_; }

  float& operator[](std::size_t flat) { return data_[flat]; }
  float operator[](std::size_t flat) const { return data_[flat]; }

  /// Bounds-checked multi-index access.
  float& at(std::initializer_list<std::size_t> index);
  float at(std::initializer_list<std::size_t> index) const;
  std::size_t offset(std::initializer_list<std::size_t> index) const;

  /// Same data, new shape. Element count must match.
  Tensor reshaped(Dims dims) const&;
  Tensor reshaped(Dims dims) &&;

  bool operator==(const Tensor& other) const = default;

 private:
  Dims dims_;
  std::vector<float> data_;
};

/// Throws TensorError naming `op` if any element is NaN or infinite.
void check_finite(const Tensor& t, std::string_view op);

/// Throws TensorError unless `t` has exactly `rank` axes.
void require_rank(const Tensor& t, std::size_t rank, std::string_view what);

float max_abs_diff(const Tensor& a, const Tensor& b);

/// Seeded generator used for every random weight and test fixture.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  float uniform(float lo, float hi);
  Tensor uniform_tensor(Dims dims, float lo, float hi);
  std::size_t index(std::size_t n);
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace papr
