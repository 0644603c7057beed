// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include "texrecon/encoder.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "texrecon/ops.hpp"

namespace texrecon {

std::size_t EncoderConfig::feature_width() const {
  const int sum = std::accumulate(channels.begin(), channels.end(), 0);
  return static_cast<std::size_t>(sum + input_channels + 6 * pe_bands);
}

void EncoderConfig::validate(int resolution) const {
  if (scales < 1) throw std::invalid_argument("encoder: scales must be >= 1");
  if (static_cast<int>(channels.size()) != scales) {
    throw std::invalid_argument("encoder: " + std::to_string(channels.size()) + " channel widths for " +
                                std::to_string(scales) + " scales");
  }
  for (int c : channels)
    if (c < 1) throw std::invalid_argument("encoder: channel widths must be positive");
  if (kernel < 1 || kernel % 2 == 0) throw std::invalid_argument("encoder: kernel size must be odd");
  if (input_channels < 1) throw std::invalid_argument("encoder: input_channels must be >= 1");
  if (pe_bands < 1) throw std::invalid_argument("encoder: pe_bands must be >= 1");
  if (!(norm_eps > 0)) throw std::invalid_argument("encoder: norm_eps must be positive");
  if (resolution > 0 && (scales >= 31 || resolution % (1 << scales) != 0)) {
    throw std::invalid_argument("encoder: resolution " + std::to_string(resolution) + " is not divisible by 2^" +
                                std::to_string(scales));
  }
}

void init_encoder(ParamStore& store, const EncoderConfig& cfg, const std::string& prefix, std::mt19937_64& rng) {
  cfg.validate();
  const std::size_t k = static_cast<std::size_t>(cfg.kernel);
  std::size_t cin = static_cast<std::size_t>(cfg.input_channels);
  for (int l = 0; l < cfg.scales; ++l) {
    const std::size_t cout = static_cast<std::size_t>(cfg.channels[l]);
    const std::string base = prefix + "/conv" + std::to_string(l + 1);
    store.add_he_uniform(base + "/w", {cout, cin, k, k, k}, cin * k * k * k, rng);
    store.add_zeros(base + "/b", {cout});
    cin = cout;
  }
}

MultiScaleFeatures encode(Tape& tape, const TensorPtr& input, const ParamStore& store, const EncoderConfig& cfg,
                          const std::string& prefix, const Aabb& box) {
  if (input->rank() != 4 || static_cast<int>(input->dim(0)) != cfg.input_channels) {
    throw std::invalid_argument("encode: expected [" + std::to_string(cfg.input_channels) + ",K,K,K] input, got " +
                                shape_to_string(input->shape()));
  }
  const int k = static_cast<int>(input->dim(1));
  if (static_cast<int>(input->dim(2)) != k || static_cast<int>(input->dim(3)) != k) {
    throw std::invalid_argument("encode: input grid must be cubic, got " + shape_to_string(input->shape()));
  }
  cfg.validate(k);
  MultiScaleFeatures out;
  out.box = box;
  out.grids.push_back(input);
  TensorPtr x = input;
  for (int l = 1; l <= cfg.scales; ++l) {
    const std::string base = prefix + "/conv" + std::to_string(l);
    x = conv3d(tape, x, store.get(base + "/w"), store.get(base + "/b"), cfg.kernel / 2);
    x = instance_norm(tape, relu(tape, x), cfg.norm_eps);
    x = maxpool3d(tape, x, 2);
    out.grids.push_back(x);
  }
  return out;
}

MultiScaleFeatures encode(Tape& tape, const OccupancyGrid& grid, const ParamStore& store, const EncoderConfig& cfg,
                          const std::string& prefix) {
  auto input = std::make_shared<Tensor>(grid_tensor(grid, cfg.input_channels == 4));
  return encode(tape, input, store, cfg, prefix, grid.box);
}

Tensor positional_embedding(std::span<const double> points, int bands) {
  if (bands < 1) throw std::invalid_argument("positional_embedding: bands must be >= 1");
  if (points.size() % 3) throw std::invalid_argument("positional_embedding: points must be a flat N x 3 array");
  const std::size_t n = points.size() / 3, l = static_cast<std::size_t>(bands);
  Tensor out({n, 6 * l});
  auto y = out.data();
  for (std::size_t p = 0; p < n; ++p) {
    double* row = y.data() + p * 6 * l;
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t j = 0; j < l; ++j) {
        const double a = std::ldexp(std::numbers::pi, static_cast<int>(j)) * points[3 * p + c];
        row[(c * l + j) * 2] = std::sin(a);
        row[(c * l + j) * 2 + 1] = std::cos(a);
      }
    }
  }
  return out;
}

TensorPtr query_features(Tape& tape, const MultiScaleFeatures& msf, std::span<const double> points, int bands) {
  std::vector<TensorPtr> parts;
  parts.reserve(msf.grids.size() + 1);
  for (const auto& g : msf.grids) parts.push_back(trilinear_sample(tape, g, points));
  parts.push_back(std::make_shared<Tensor>(positional_embedding(points, bands)));
  return concat_cols(tape, parts);
}

}  // namespace texrecon
