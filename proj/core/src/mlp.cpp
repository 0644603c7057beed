// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include "texrecon/mlp.hpp"

#include <stdexcept>

#include "texrecon/ops.hpp"

namespace texrecon {

namespace {

std::string layer_name(const MlpSpec& spec, std::size_t i, const char* what) {
  return spec.prefix + "/l" + std::to_string(i) + "/" + what;
}

}  // namespace

void init_mlp(ParamStore& store, const MlpSpec& spec, std::mt19937_64& rng, bool zero_last) {
  if (spec.widths.size() < 2) throw std::invalid_argument("mlp '" + spec.prefix + "': needs at least two widths");
  for (std::size_t i = 0; i < spec.layers(); ++i) {
    const std::size_t fin = spec.widths[i], fout = spec.widths[i + 1];
    if (zero_last && i + 1 == spec.layers()) {
      store.add_zeros(layer_name(spec, i, "w"), {fout, fin});
    } else {
      store.add_he_uniform(layer_name(spec, i, "w"), {fout, fin}, fin, rng);
    }
    store.add_zeros(layer_name(spec, i, "b"), {fout});
  }
}

TensorPtr mlp_forward(Tape& tape, const ParamStore& store, const MlpSpec& spec, const TensorPtr& input) {
  if (input->rank() != 2 || input->dim(1) != spec.in_width()) {
    throw std::invalid_argument("mlp '" + spec.prefix + "': expected [N, " + std::to_string(spec.in_width()) +
                                "] input, got " + shape_to_string(input->shape()));
  }
  TensorPtr x = input;
  for (std::size_t i = 0; i < spec.layers(); ++i) {
    x = linear(tape, x, store.get(layer_name(spec, i, "w")), store.get(layer_name(spec, i, "b")));
    if (i + 1 < spec.layers()) x = relu(tape, x);
  }
  return x;
}

}  // namespace texrecon
