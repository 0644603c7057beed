// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "texrecon/mesh.hpp"

namespace texrecon {

/// Extracts the iso-surface of a scalar field sampled on K^3 lattice nodes.
///
/// Node (x, y, z) has flat index (z*K + y)*K + x and sits at
/// box.min + (x, y, z) / (K - 1) * box.size(). Values >= iso are inside.
/// Vertices are welded per lattice edge and triangles face outward (toward
/// lower field values). A field with no iso-crossing on the lattice boundary
/// yields a watertight surface.
TriangleMesh marching_cubes(std::span<const double> field, int resolution, double iso, const Aabb& box);

}  // namespace texrecon
