// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "texrecon/mesh.hpp"

namespace texrecon {

/// Point-in-solid test for a closed mesh by ray-crossing parity.
///
/// Rays run along +axis. Triangles are binned on a 2D grid over the other two
/// axes, so each query only visits triangles whose projection can contain it.
/// A ray that grazes an edge or vertex is re-cast from a deterministically
/// jittered origin.
class InsideTester {
 public:
  /// Throws std::invalid_argument unless the mesh is watertight.
  explicit InsideTester(const TriangleMesh& mesh, int axis = 0);

  bool contains(const Vec3& p) const;

 private:
  int cast(double pu, double pv, double pa, bool& degenerate) const;

  int axis_, u_, v_;
  Aabb box_;
  double tol_ = 0;
  int bins_ = 1;
  double bin_u0_ = 0, bin_v0_ = 0, bin_du_ = 1, bin_dv_ = 1;
  std::vector<std::uint32_t> bin_start_;
  std::vector<std::uint32_t> bin_tris_;
  // Per triangle: projected (u, v) corners and axis coordinates.
  std::vector<std::array<double, 9>> tris_;
};

/// 1 for points inside the watertight mesh, 0 otherwise.
std::vector<std::uint8_t> occupancy_oracle(const TriangleMesh& mesh, std::span<const Vec3> points, int axis = 0);

}  // namespace texrecon
