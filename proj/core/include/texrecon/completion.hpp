// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "texrecon/config.hpp"
#include "texrecon/encoder.hpp"
#include "texrecon/inside.hpp"
#include "texrecon/mesh.hpp"
#include "texrecon/mlp.hpp"
#include "texrecon/sampling.hpp"
#include "texrecon/voxel.hpp"

namespace texrecon {

/// Query points in the normalized frame with their supervision.
struct QueryBatch {
  std::vector<double> points;  // N*3
  std::vector<double> labels;  // N occupancy bits or N*3 RGB in [0,1]
  std::vector<double> sigmas;  // noise scales the points were drawn with

  std::size_t size() const { return points.size() / 3; }
};

/// count/|sigmas| surface samples per sigma (the last sigma takes the
/// remainder), each displaced by isotropic Gaussian noise of that sigma and
/// labeled by the inside test. Throws on a non-watertight mesh.
QueryBatch sample_shape_queries(const TriangleMesh& gt, std::size_t count, std::span<const double> sigmas,
                                std::uint64_t seed);
/// Same, reusing a prebuilt inside tester for `gt`.
QueryBatch sample_shape_queries(const TriangleMesh& gt, const InsideTester& inside, std::size_t count,
                                std::span<const double> sigmas, std::uint64_t seed);

/// Surface samples moved along their face normal by N(0, normal_sigma),
/// labeled with the interpolated surface color. Throws without colors.
QueryBatch sample_texture_queries(const TriangleMesh& gt, std::size_t count, double normal_sigma, std::uint64_t seed);

/// Decoder widths: feature width, hidden layers, then `outputs`.
MlpSpec decoder_spec(const std::string& prefix, std::size_t feature_width, const std::vector<std::size_t>& hidden,
                     std::size_t outputs);

/// Occupancy probabilities [N] in (0,1).
TensorPtr shape_decode(Tape& tape, const ParamStore& store, const MlpSpec& spec, const TensorPtr& features);
/// Colors [N,3] in (0,1).
TensorPtr texture_decode(Tape& tape, const ParamStore& store, const MlpSpec& spec, const TensorPtr& features);
/// Internal [0,1] color to the external 0..255 range.
inline double color_to_external(double c) { return 255.0 * c; }

struct BceWeights {
  double positive = 1;
  double negative = 1;
};
inline constexpr double kMinClassWeight = 0.05;
/// Class weights from the label frequencies of one batch, each floored at
/// kMinClassWeight (uniform weighting is exactly 1 and 1).
BceWeights bce_weights(std::span<const double> labels, BceWeighting mode);
TensorPtr balanced_bce(Tape& tape, const TensorPtr& pred, std::span<const double> labels, BceWeighting mode);

/// Mean per-point L1 color error for pred [N,3].
TensorPtr texture_loss(Tape& tape, const TensorPtr& pred, std::span<const double> labels);

/// Keeps every partial triangle, adds the predicted triangles whose centroid
/// lies farther than `tau` from a dense sample set of the partial surface,
/// and snaps predicted vertices onto partial vertices within 1e-6. Partial
/// vertices and faces come first, in their original order. A colored partial
/// gives added vertices mid grey when the prediction has no colors.
TriangleMesh shape_fusion(const TriangleMesh& predicted, const TriangleMesh& partial, double tau);

/// World-to-normalized transform that fits `box` into the normalized target.
SimilarityTransform frame_for_box(const Aabb& box);

/// Surface-samples a world-space mesh, maps the samples through `frame` and
/// voxelizes them over [0,1]^3. Colors are carried when the mesh has them.
OccupancyGrid voxelize_in_frame(const TriangleMesh& mesh, const SimilarityTransform& frame, int resolution,
                                std::size_t samples, std::uint64_t seed);

/// Marching-cubes lattice nodes over [0,1]^3 in flat (z*K + y)*K + x order.
std::vector<double> lattice_points(int resolution);

/// Occupancy probabilities at `points` (N*3), decoded in chunks.
std::vector<double> decode_occupancy(const MultiScaleFeatures& msf, const ParamStore& store, const MlpSpec& spec,
                                     int pe_bands, std::span<const double> points, std::size_t chunk = 4096);
/// Colors in [0,1] at `points`, decoded in chunks.
std::vector<Vec3> decode_colors(const MultiScaleFeatures& msf, const ParamStore& store, const MlpSpec& spec,
                                int pe_bands, std::span<const double> points, std::size_t chunk = 4096);

}  // namespace texrecon
