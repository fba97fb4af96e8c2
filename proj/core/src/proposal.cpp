// SPDX-License-Identifier: Apache-2.0
#include "papr/proposal.hpp"

#include <algorithm>

namespace papr {

std::size_t ProposalNet::downscale() const {
  std::size_t d = 1;
  for (const auto& l : layers) d *= l.stride[0];
  return d;
}

ConvFeatureMap ProposalNet::forward(const Tensor& image) const {
  if (layers.empty()) throw TensorError("proposal network has no layers");
  Tensor x = image;
  for (const auto& layer : layers) x = relu(conv2d(x, layer));
  return ConvFeatureMap(std::move(x));
}

ConvFeatureMap ProposalNet::forward_clip(const Tensor& frames) const {
  require_rank(frames, 4, "proposal clip input");
  const std::size_t t = frames.dim(0);
  const std::size_t frame_size = frames.numel() / t;
  const Dims frame_dims(frames.dims().begin() + 1, frames.dims().end());

  std::vector<Tensor> per_frame;
  per_frame.reserve(t);
  for (std::size_t f = 0; f < t; ++f) {
    const auto first = frames.data().begin() + static_cast<std::ptrdiff_t>(f * frame_size);
    Tensor frame(frame_dims, std::vector<float>(first, first + static_cast<std::ptrdiff_t>(frame_size)));
    per_frame.push_back(forward(frame).features());
  }
  const std::size_t k = per_frame.front().dim(0);
  const std::size_t h = per_frame.front().dim(1);
  const std::size_t w = per_frame.front().dim(2);
  Tensor out({k, t, h, w});
  for (std::size_t f = 0; f < t; ++f) {
    for (std::size_t c = 0; c < k; ++c) {
      const auto src = per_frame[f].data().subspan(c * h * w, h * w);
      std::copy(src.begin(), src.end(), out.data().begin() + static_cast<std::ptrdiff_t>(((c * t) + f) * h * w));
    }
  }
  return ConvFeatureMap(std::move(out));
}

}  // namespace papr
