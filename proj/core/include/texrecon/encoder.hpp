// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <span>
#include <string>
#include <vector>

#include "texrecon/mesh.hpp"
#include "texrecon/param_store.hpp"
#include "texrecon/tensor.hpp"
#include "texrecon/voxel.hpp"

namespace texrecon {

struct EncoderConfig {
  int scales = 6;
  std::vector<int> channels{16, 32, 64, 64, 64, 64};
  int kernel = 3;
  int input_channels = 1;
  int pe_bands = 8;
  double norm_eps = 1e-5;

  /// Width of one query_features row: sum(channels) + input_channels + 6L.
  std::size_t feature_width() const;
  /// Throws std::invalid_argument on an inconsistent config, or when
  /// `resolution` (if positive) is not divisible by 2^scales.
  void validate(int resolution = 0) const;
};

/// Feature pyramid X_0..X_n; grid l has resolution K / 2^l. X_0 is the raw
/// input grid.
struct MultiScaleFeatures {
  std::vector<TensorPtr> grids;
  Aabb box;

  int levels() const { return static_cast<int>(grids.size()); }
  const TensorPtr& top() const { return grids.back(); }
};

/// Registers the conv kernels "<prefix>/conv<l>/w" and biases.
void init_encoder(ParamStore& store, const EncoderConfig& cfg, const std::string& prefix, std::mt19937_64& rng);

/// X'_l = IN(ReLU(Conv(X_{l-1}))), X_l = MaxPool(X'_l) for l = 1..n.
/// `input` is [input_channels, K, K, K].
MultiScaleFeatures encode(Tape& tape, const TensorPtr& input, const ParamStore& store, const EncoderConfig& cfg,
                          const std::string& prefix, const Aabb& box = {Vec3::Zero(), Vec3::Ones()});
MultiScaleFeatures encode(Tape& tape, const OccupancyGrid& grid, const ParamStore& store, const EncoderConfig& cfg,
                          const std::string& prefix);

/// Fourier features of points [N,3] -> [N, 6L]. Row layout: for each
/// coordinate c in (x, y, z), for each band j in 0..L-1, the pair
/// sin(2^j * pi * c), cos(2^j * pi * c).
Tensor positional_embedding(std::span<const double> points, int bands);

/// Trilinear lookups at every level, concatenated in ascending level order,
/// then the positional embedding. Points are normalized [N,3] coordinates.
TensorPtr query_features(Tape& tape, const MultiScaleFeatures& msf, std::span<const double> points, int bands);

}  // namespace texrecon
