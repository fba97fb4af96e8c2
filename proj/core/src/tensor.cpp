// SPDX-License-Identifier: Apache-2.0
#include "papr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace papr {

std::size_t dims_product(std::span<const std::size_t> dims) {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::string dims_to_string(std::span<const std::size_t> dims) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) os << ',';
    os << dims[i];
  }
  os << ']';
  return os.str();
}

namespace {

void validate_dims(const Dims& dims) {
  for (auto d : dims) {
    if (d == 0) throw TensorError("tensor extents must be positive, got " + dims_to_string(dims));
  }
}

}  // namespace

Tensor::Tensor(Dims dims, float fill) : dims_(std::move(dims)) {
  validate_dims(dims_);
  data_.assign(dims_product(dims_), fill);
}

Tensor::Tensor(Dims dims, std::vector<float> data) : dims_(std::move(dims)), data_(std::move(data)) {
  validate_dims(dims_);
  if (data_.size() != dims_product(dims_)) {
    throw TensorError("data length " + std::to_string(data_.size()) + " does not match dims " +
                      dims_to_string(dims_));
  }
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= dims_.size()) {
    throw TensorError("axis " + std::to_string(axis) + " out of range for rank " +
                      std::to_string(dims_.size()));
  }
  return dims_[axis];
}

std::size_t Tensor::offset(std::initializer_list<std::size_t> index) const {
  if (index.size() != dims_.size()) throw TensorError("index rank does not match tensor rank");
  std::size_t flat = 0;
  std::size_t axis = 0;
  for (auto i : index) {
    if (i >= dims_[axis]) throw TensorError("index out of range on axis " + std::to_string(axis));
    flat = flat * dims_[axis] + i;
    ++axis;
  }
  return flat;
}

float& Tensor::at(std::initializer_list<std::size_t> index) { return data_[offset(index)]; }
float Tensor::at(std::initializer_list<std::size_t> index) const { return data_[offset(index)]; }

Tensor Tensor::reshaped(Dims dims) const& {
  Tensor copy = *this;
  return std::move(copy).reshaped(std::move(dims));
}

Tensor Tensor::reshaped(Dims dims) && {
  validate_dims(dims);
  if (dims_product(dims) != data_.size()) {
    throw TensorError("cannot reshape " + dims_to_string(dims_) + " to " + dims_to_string(dims));
  }
  dims_ = std::move(dims);
  return std::move(*this);
}

void check_finite(const Tensor& t, std::string_view op) {
  const auto data = t.data();
  if (std::any_of(data.begin(), data.end(), [](float v) { return !std::isfinite(v); })) {
    throw TensorError(std::string(op) + ": non-finite value in result");
  }
}

void require_rank(const Tensor& t, std::size_t rank, std::string_view what) {
  if (t.rank() != rank) {
    throw TensorError(std::string(what) + ": expected rank " + std::to_string(rank) + ", got " +
                      dims_to_string(t.dims()));
  }
}

float max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.dims() != b.dims()) {
    throw TensorError("max_abs_diff: shape mismatch " + dims_to_string(a.dims()) + " vs " +
                      dims_to_string(b.dims()));
  }
  float m = 0.0f;
  for (std::size_t i = 0; i < a.numel(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// 24 high bits of the engine output, so the stream is identical on every
// standard library (std::uniform_real_distribution is not).
float Rng::uniform(float lo, float hi) {
  const auto bits = static_cast<std::uint32_t>(engine_() >> 40);
  const float unit = static_cast<float>(bits) * (1.0f / 16777216.0f);
  return lo + (hi - lo) * unit;
}

Tensor Rng::uniform_tensor(Dims dims, float lo, float hi) {
  Tensor t(std::move(dims));
  for (auto& v : t.data()) v = uniform(lo, hi);
  return t;
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw TensorError("Rng::index on empty range");
  return static_cast<std::size_t>(engine_() % n);
}

}  // namespace papr
