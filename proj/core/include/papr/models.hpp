// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "papr/model_spec.hpp"
#include "papr/proposal.hpp"
#include "papr/prune_hier.hpp"
#include "papr/prune_token.hpp"

namespace papr {

enum class InitKind { Uniform, Ones, Zeros };

/// One named parameter tensor of a runnable model.
struct ParamDesc {
  std::string name;
  Dims dims;
  InitKind init = InitKind::Uniform;
  std::size_t fan_in = 1;
};

using ParameterSet = std::map<std::string, Tensor>;

/// Every parameter a spec needs, in a fixed order. Runnable families:
/// token-vit (image input), hierarchical with convnext blocks, and custom
/// convnet proposal stacks.
std::vector<ParamDesc> parameter_layout(const ModelSpec& spec);

/// Uniform [-s, s], s = 1/sqrt(fan_in), drawn in layout order from `seed`.
/// Norm scales are 1 and norm shifts 0.
ParameterSet random_parameters(const ModelSpec& spec, std::uint64_t seed);

/// Throws SpecError when a parameter is missing, unexpected or mis-shaped.
void check_parameters(const ModelSpec& spec, const ParameterSet& params);

VisionTransformer build_vit(const ModelSpec& spec, const ParameterSet& params);
HierarchicalNet build_hierarchical(const ModelSpec& spec, const ParameterSet& params);
ProposalNet build_proposal(const ModelSpec& spec, const ParameterSet& params);

}  // namespace papr
