// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <string>
#include <vector>

#include "texrecon/param_store.hpp"
#include "texrecon/tensor.hpp"

namespace texrecon {

/// Fully connected stack stored as "<prefix>/l<i>/w" and "<prefix>/l<i>/b".
/// `widths` lists input width, hidden widths and output width.
struct MlpSpec {
  std::string prefix;
  std::vector<std::size_t> widths;

  std::size_t layers() const { return widths.size() - 1; }
  std::size_t in_width() const { return widths.front(); }
  std::size_t out_width() const { return widths.back(); }
};

/// He-uniform weights, zero biases. With `zero_last` the final layer's
/// weights start at zero so the stack initially outputs its bias.
void init_mlp(ParamStore& store, const MlpSpec& spec, std::mt19937_64& rng, bool zero_last = false);

/// ReLU between layers, none after the last. Input [N, in_width].
TensorPtr mlp_forward(Tape& tape, const ParamStore& store, const MlpSpec& spec, const TensorPtr& input);

}  // namespace texrecon
