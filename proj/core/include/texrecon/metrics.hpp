// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "texrecon/mesh.hpp"
#include "texrecon/sampling.hpp"

namespace texrecon {

struct MeshMetrics {
  double chamfer = 0;
  std::optional<double> volumetric_iou;
  /// Mean absolute per-channel color difference in [0,255] units.
  std::optional<double> texture_mae;
};

/// Symmetric chamfer: average of the two directed mean nearest-neighbour
/// distances between the point sets.
double chamfer_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

/// IoU of the solids over `resolution`^3 cell centers spanning the union of
/// both bounding boxes. Both meshes must be watertight.
double volumetric_iou(const TriangleMesh& a, const TriangleMesh& b, int resolution = 64);

/// Chamfer over `sample_count` surface samples per mesh, IoU when requested,
/// texture MAE when both meshes carry colors.
MeshMetrics eval_metrics(const TriangleMesh& a, const TriangleMesh& b, std::size_t sample_count, std::uint64_t seed,
                         bool want_iou = true);

}  // namespace texrecon
