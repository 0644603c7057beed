// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "texrecon/mesh.hpp"

namespace texrecon {

struct SurfaceSampleSet {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  std::vector<Vec3> colors;  // empty when the mesh is uncolored
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> faces;  // source face of each sample
};

/// Area-proportional barycentric sampling. Normals come from the face planes,
/// colors are interpolated barycentrically. Deterministic in (mesh, count, seed).
SurfaceSampleSet sample_surface(const TriangleMesh& mesh, std::size_t count, std::uint64_t seed);

/// Uniform scale followed by a translation: p -> scale * p + offset.
struct SimilarityTransform {
  double scale = 1.0;
  Vec3 offset = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return scale * p + offset; }
  Vec3 invert(const Vec3& q) const { return (q - offset) / scale; }
  TriangleMesh apply(const TriangleMesh& mesh) const;
  TriangleMesh invert(const TriangleMesh& mesh) const;
  Aabb apply(const Aabb& box) const { return {apply(box.min), apply(box.max)}; }
  Aabb invert(const Aabb& box) const { return {invert(box.min), invert(box.max)}; }
};

/// Default normalized frame: geometry is fitted into [0.05, 0.95]^3 so that
/// near-surface jitter stays inside the [0,1]^3 grid.
Aabb normalized_target_box();

inline constexpr double kDegeneratePad = 1e-6;

/// Fits `source` into `target` with one uniform scale: the longest source axis
/// spans the matching target extent and the result is centered. Throws on a
/// source box with a zero extent (pad it first).
SimilarityTransform fit_box(const Aabb& source, const Aabb& target);

/// Fits the mesh's tight box (padded to kDegeneratePad per axis) into `target`.
std::pair<TriangleMesh, SimilarityTransform> normalize_to_box(const TriangleMesh& mesh, const Aabb& target);

}  // namespace texrecon
